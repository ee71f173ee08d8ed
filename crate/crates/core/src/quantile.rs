//! Empirical quantile function along the chain, and the quantile-to-point
//! map used by the pulse assembly.

use crate::chain::PolygonalChain;
use crate::float::Float;

/// Monotone piecewise-linear map from quantile order `[0, 1]` to arc
/// length `[0, L]` along the chain.
///
/// With `n` ordered points the grid is `0, (k - 0.5)/n for k = 1..=n, 1`
/// and the values are `0`, the points' arc coordinates, and `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileEstimate<F> {
    alphas: Vec<F>,
    values: Vec<F>,
    clamped: bool,
}

impl<F: Float> QuantileEstimate<F> {
    pub fn from_chain(chain: &PolygonalChain<F>) -> Self {
        let n = chain.num_points();
        let nf = F::from_count(n);
        let half = F::cast(0.5);
        let mut alphas = Vec::with_capacity(n + 2);
        let mut values = Vec::with_capacity(n + 2);
        alphas.push(F::zero());
        values.push(F::zero());
        for k in 1..=n {
            alphas.push((F::from_count(k) - half) / nf);
            values.push(chain.arc_coordinate(k).unwrap());
        }
        alphas.push(F::one());
        values.push(chain.total_len());

        // Arc coordinates along the chain are nondecreasing by
        // construction; clamp with a running maximum anyway so the result
        // is always a valid quantile function, and flag it.
        let mut clamped = false;
        let mut run_max = F::zero();
        for v in values.iter_mut() {
            if *v < run_max {
                *v = run_max;
                clamped = true;
            } else {
                run_max = *v;
            }
        }
        Self { alphas, values, clamped }
    }

    /// Build from an explicit grid. `alphas` must increase strictly from 0
    /// to 1; `values` must be nonnegative and are clamped nondecreasing.
    pub fn from_grid(alphas: Vec<F>, values: Vec<F>) -> crate::error::Result<Self> {
        use crate::error::Error;
        if alphas.len() != values.len() || alphas.len() < 2 {
            return Err(Error::invalid("grid needs matching alphas/values, length >= 2"));
        }
        if alphas[0] != F::zero() || *alphas.last().unwrap() != F::one() {
            return Err(Error::invalid("alpha grid must span [0, 1]"));
        }
        if alphas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("alpha grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < F::zero()) {
            return Err(Error::invalid("grid values must be finite and nonnegative"));
        }
        let mut values = values;
        let mut clamped = false;
        let mut run_max = F::zero();
        for v in values.iter_mut() {
            if *v < run_max {
                *v = run_max;
                clamped = true;
            } else {
                run_max = *v;
            }
        }
        Ok(Self { alphas, values, clamped })
    }

    /// Whether the grid had to be clamped to stay nondecreasing.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    pub fn grid(&self) -> (&[F], &[F]) {
        (&self.alphas, &self.values)
    }

    /// Evaluate at `alpha in [0, 1]` (clamped outside) by linear
    /// interpolation between grid nodes.
    pub fn eval(&self, alpha: F) -> F {
        if alpha <= F::zero() {
            return self.values[0];
        }
        if alpha >= F::one() {
            return *self.values.last().unwrap();
        }
        let j = self.alphas.partition_point(|&a| a < alpha);
        let (a0, a1) = (self.alphas[j - 1], self.alphas[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        let r = (alpha - a0) / (a1 - a0);
        v0 + r * (v1 - v0)
    }

    /// `true` when the map never decreases (always holds after clamping;
    /// kept as an explicit check for tests).
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// The point of the estimated curve at quantile order `alpha`: the chain
/// point at arc coordinate `Q(alpha)` for `alpha` in `(0, 1)`, and the
/// zero vector for `alpha <= 0` or `alpha >= 1` (the signal vanishes
/// outside its support, so the curve is extended by the origin).
pub fn quantile_point<F: Float>(
    chain: &PolygonalChain<F>,
    quantile: &QuantileEstimate<F>,
    alpha: F,
) -> Vec<F> {
    if alpha <= F::zero() || alpha >= F::one() {
        return vec![F::zero(); chain.dim()];
    }
    let s = quantile.eval(alpha).min(chain.total_len()).max(F::zero());
    chain.point_at(s).expect("arc coordinate clamped into range")
}
