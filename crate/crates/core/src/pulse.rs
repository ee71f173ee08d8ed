//! Finite-support pulse signals given by interpolation knots.
//!
//! A pulse vanishes outside the open interval `(0, T)` where `T` is its
//! support length; inside, it is the linear or natural-cubic interpolant
//! through its knots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::Float;

/// Interpolation rule between knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interp {
    Linear,
    Cubic,
}

/// A real-valued signal with finite support `(0, T)`.
///
/// Knot times are strictly increasing, start at `0`, and end at `T`; the
/// first and last knot values are zero so the interpolant joins the zero
/// extension continuously. Evaluation outside `(0, T)` is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSignal<F> {
    times: Vec<F>,
    values: Vec<F>,
    interp: Interp,
    /// Second derivatives at the knots (natural spline); empty for linear.
    curvatures: Vec<F>,
}

impl<F: Float> PulseSignal<F> {
    pub fn new(times: Vec<F>, values: Vec<F>, interp: Interp) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("knot times and values differ in length"));
        }
        if times.len() < 2 {
            return Err(Error::invalid("a pulse needs at least two knots"));
        }
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("knots must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("knot times must be strictly increasing"));
        }
        if times[0] != F::zero() {
            return Err(Error::invalid("first knot time must be 0"));
        }
        if *times.last().unwrap() <= F::zero() {
            return Err(Error::invalid("support length must be positive"));
        }
        if values[0] != F::zero() || *values.last().unwrap() != F::zero() {
            return Err(Error::invalid("first and last knot values must be 0"));
        }
        let curvatures = match interp {
            Interp::Linear => Vec::new(),
            Interp::Cubic => natural_spline_curvatures(&times, &values),
        };
        Ok(Self { times, values, interp, curvatures })
    }

    /// Support length `T`: the pulse is zero outside `(0, T)`.
    pub fn support_len(&self) -> F {
        *self.times.last().unwrap()
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn knot_times(&self) -> &[F] {
        &self.times
    }

    pub fn knot_values(&self) -> &[F] {
        &self.values
    }

    /// Evaluate the pulse at time `t`; exactly zero for `t <= 0` and
    /// `t >= T`.
    pub fn eval(&self, t: F) -> F {
        if t <= F::zero() || t >= self.support_len() {
            return F::zero();
        }
        // Segment index i with times[i] <= t < times[i+1].
        let i = self
            .times
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(self.times.len() - 2);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let h = t1 - t0;
        match self.interp {
            Interp::Linear => {
                let r = (t - t0) / h;
                v0 + r * (v1 - v0)
            }
            Interp::Cubic => {
                let (m0, m1) = (self.curvatures[i], self.curvatures[i + 1]);
                let six = F::cast(6.0);
                let a = t1 - t;
                let b = t - t0;
                m0 * a * a * a / (six * h)
                    + m1 * b * b * b / (six * h)
                    + (v0 / h - m0 * h / six) * a
                    + (v1 / h - m1 * h / six) * b
            }
        }
    }

    /// Same pulse with all amplitudes multiplied by `c`.
    pub fn scale_amplitude(&self, c: F) -> Self {
        let values = self.values.iter().map(|&v| v * c).collect();
        Self::new(self.times.clone(), values, self.interp).expect("scaled knots stay valid")
    }

    /// Same pulse with time stretched by `gamma` (support becomes `gamma * T`).
    pub fn stretch_time(&self, gamma: F) -> Self {
        let times = self.times.iter().map(|&t| t * gamma).collect();
        Self::new(times, self.values.clone(), self.interp).expect("stretched knots stay valid")
    }

    /// Unit triangle pulse on `(0, 1)`: `p(t) = 1 - |2t - 1|`.
    pub fn triangle() -> Self {
        Self::new(
            vec![F::zero(), F::cast(0.5), F::one()],
            vec![F::zero(), F::one(), F::zero()],
            Interp::Linear,
        )
        .unwrap()
    }

    /// Default test fixture: a smooth, asymmetric two-lobe bump on `(0, 1)`,
    /// sampled at 41 knots and interpolated with a natural cubic spline.
    /// The decay factor keeps the two lobes well separated in train space,
    /// so curve ordering is reliable already at a few hundred trains.
    pub fn two_lobe() -> Self {
        Self::from_fn(41, |t| {
            let s2 = (2.0 * std::f64::consts::PI * t).sin();
            let s1 = (std::f64::consts::PI * t).sin();
            (0.7 * s2 * s2 + 0.3 * s1 * s1) * (1.0 - 0.7 * t)
        })
    }

    /// Single smooth asymmetric lobe on `(0, 1)`. Its train curve has no
    /// close self-approaches, which makes it the fixture of choice for
    /// failure-statistics studies where ordering should only fail for
    /// lack of data, not geometry.
    pub fn one_lobe() -> Self {
        Self::from_fn(41, |t| (std::f64::consts::PI * t).sin() * (1.0 - 0.5 * t))
    }

    /// Cubic-spline pulse through `n` uniform knots on `(0, 1)` sampled
    /// from `f`, with the endpoint values forced to zero.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let mut times = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            times.push(F::cast(t));
            values.push(if i == 0 || i == n - 1 { F::zero() } else { F::cast(f(t)) });
        }
        Self::new(times, values, Interp::Cubic).unwrap()
    }
}

/// Natural cubic spline: second derivatives at the knots, solved with the
/// Thomas algorithm (zero curvature at both ends).
fn natural_spline_curvatures<F: Float>(times: &[F], values: &[F]) -> Vec<F> {
    let n = times.len();
    let mut m = vec![F::zero(); n];
    if n < 3 {
        return m;
    }
    let six = F::cast(6.0);
    let two = F::cast(2.0);
    // Interior equations i = 1..n-1:
    //   h[i-1]*m[i-1] + 2(h[i-1]+h[i])*m[i] + h[i]*m[i+1] = 6*(d[i] - d[i-1])
    // with h[i] = t[i+1]-t[i], d[i] = (v[i+1]-v[i])/h[i].
    let mut diag = vec![F::zero(); n];
    let mut rhs = vec![F::zero(); n];
    let h = |i: usize| times[i + 1] - times[i];
    let d = |i: usize| (values[i + 1] - values[i]) / h(i);
    for i in 1..n - 1 {
        diag[i] = two * (h(i - 1) + h(i));
        rhs[i] = six * (d(i) - d(i - 1));
    }
    // Forward sweep (m[0] = m[n-1] = 0 stay eliminated).
    for i in 2..n - 1 {
        let w = h(i - 1) / diag[i - 1];
        diag[i] = diag[i] - w * h(i - 1);
        rhs[i] = rhs[i] - w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        let upper = if i + 1 < n - 1 { h(i) * m[i + 1] } else { F::zero() };
        m[i] = (rhs[i] - upper) / diag[i];
    }
    m
}
