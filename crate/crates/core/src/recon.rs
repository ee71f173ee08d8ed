//! Pulse reconstruction: from an ordered point set to a pulse estimate.
//!
//! [`reconstruct_from_trains`] is the full estimator working on a finite,
//! unordered set of sample trains. [`reconstruct_from_curve`] is its
//! exact-data counterpart: it samples the true curve at known quantile
//! positions and inverts it directly, serving as the reference the
//! estimator converges to.

use crate::chain::PolygonalChain;
use crate::error::{Error, Result, Stage};
use crate::float::Float;
use crate::ordering::{nn_crust, orient, PointCloud};
use crate::pulse::{Interp, PulseSignal};
use crate::quantile::{quantile_point, QuantileEstimate};
use crate::train::{sample_train, SamplingConfig};

/// Fractions of the start-time range where each coordinate of the trains
/// turns on (`lower`, for coordinates `1..=d`) and off (`upper`, for
/// coordinates `2..=d+1`). All values are in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEstimates<F> {
    lower: Vec<F>,
    upper: Vec<F>,
}

impl<F: Float> AlphaEstimates<F> {
    /// Estimate the fractions from ordered points: with 1-based ordinals
    /// `n_min`/`n_max` of the first/last entry of coordinate `k` whose
    /// magnitude exceeds `axis_epsilon`, the estimates are
    /// `(n_min - 1)/n` and `n_max/n`.
    pub fn from_ordered(ordered: &PointCloud<F>, axis_epsilon: F) -> Result<Self> {
        let n = ordered.len();
        let dim = ordered.dim();
        if dim < 2 {
            return Err(Error::invalid("need at least two coordinates"));
        }
        let nf = F::from_count(n);
        let mut lower = Vec::with_capacity(dim - 1);
        let mut upper = Vec::with_capacity(dim - 1);
        for coord in 0..dim {
            let mut first = None;
            let mut last = None;
            for i in 0..n {
                if ordered.point(i)[coord].abs() > axis_epsilon {
                    if first.is_none() {
                        first = Some(i);
                    }
                    last = Some(i);
                }
            }
            let (Some(first), Some(last)) = (first, last) else {
                return Err(Error::MissingCoordinateData { coordinate: coord + 1 });
            };
            if coord < dim - 1 {
                lower.push(F::from_count(first) / nf);
            }
            if coord > 0 {
                upper.push(F::from_count(last + 1) / nf);
            }
        }
        Ok(Self { lower, upper })
    }

    /// Exact fractions for a pulse of support length `t` sampled with
    /// parameters `(d, tau)`: coordinate `k` is nonzero exactly on the
    /// fraction `((d+1-k)*tau, t + (d+1-k)*tau) / (t + d*tau)` of the
    /// start-time range.
    pub fn exact(d: usize, tau: F, support_len: F) -> Self {
        let denom = support_len + F::from_count(d) * tau;
        let lower = (1..=d)
            .map(|k| F::from_count(d + 1 - k) * tau / denom)
            .collect();
        let upper = (2..=d + 1)
            .map(|k| (support_len + F::from_count(d + 1 - k) * tau) / denom)
            .collect();
        Self { lower, upper }
    }

    /// `alpha_min` for coordinate `k = 1..=d`.
    pub fn lower(&self) -> &[F] {
        &self.lower
    }

    /// `alpha_max` for coordinate `k = 2..=d+1`.
    pub fn upper(&self) -> &[F] {
        &self.upper
    }

    /// Terms unusable by the support-length inversion (`lower == 0` or
    /// `upper == 1`).
    pub fn degenerate_count(&self) -> usize {
        self.lower.iter().filter(|&&a| a == F::zero()).count()
            + self.upper.iter().filter(|&&a| a == F::one()).count()
    }
}

/// Invert the coordinate fractions into a support-length estimate.
///
/// Each finite fraction yields one estimate of `support + d*tau`; they are
/// averaged and `d*tau` subtracted:
/// `(tau / m) * (sum_k (d+1-k)/lower_k + sum_k (k-1)/(1-upper_k)) - d*tau`
/// with `m` the number of usable terms (`2d` when none is degenerate).
/// Degenerate terms (`lower = 0`, `upper = 1`) are dropped and the average
/// renormalized; if every term drops, the data is insufficient.
pub fn estimate_support_len<F: Float>(alphas: &AlphaEstimates<F>, d: usize, tau: F) -> Result<F> {
    if alphas.lower.len() != d || alphas.upper.len() != d {
        return Err(Error::invalid("fraction estimates do not match d"));
    }
    let mut sum = F::zero();
    let mut used = 0usize;
    for (i, &a) in alphas.lower.iter().enumerate() {
        let k = i + 1;
        if a > F::zero() {
            sum = sum + F::from_count(d + 1 - k) / a;
            used += 1;
        }
    }
    for (i, &a) in alphas.upper.iter().enumerate() {
        let k = i + 2;
        if a < F::one() {
            sum = sum + F::from_count(k - 1) / (F::one() - a);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::InsufficientData {
            stage: Stage::SupportLen,
            detail: "every coordinate fraction is degenerate".into(),
        });
    }
    Ok(tau / F::from_count(used) * sum - F::from_count(d) * tau)
}

/// A reconstructed pulse: a finite-support signal on `(0, support_len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseEstimate<F> {
    pulse: PulseSignal<F>,
}

impl<F: Float> PulseEstimate<F> {
    pub fn from_pulse(pulse: PulseSignal<F>) -> Self {
        Self { pulse }
    }

    /// Estimated support length.
    pub fn support_len(&self) -> F {
        self.pulse.support_len()
    }

    pub fn pulse(&self) -> &PulseSignal<F> {
        &self.pulse
    }

    pub fn eval(&self, t: F) -> F {
        self.pulse.eval(t)
    }

    /// The zero estimate on `(0, support_len)`.
    pub fn zero(support_len: F) -> Self {
        let pulse = PulseSignal::new(
            vec![F::zero(), support_len],
            vec![F::zero(), F::zero()],
            Interp::Linear,
        )
        .expect("zero pulse knots are valid");
        Self { pulse }
    }
}

/// Assemble the pulse estimate on a uniform grid of `grid_size` knots over
/// `[0, support_len]` by averaging the `d+1` coordinate slices of the
/// quantile-to-point map:
/// `p(t) = mean_k pick_k(q((t + (d+1-k)*tau) / (support_len + d*tau)))`.
/// The endpoint values are forced to zero.
pub fn assemble_pulse<F: Float>(
    chain: &PolygonalChain<F>,
    quantile: &QuantileEstimate<F>,
    support_len: F,
    d: usize,
    tau: F,
    grid_size: usize,
) -> Result<PulseEstimate<F>> {
    if !(support_len.is_finite() && support_len > F::zero()) {
        return Err(Error::invalid("support length must be positive"));
    }
    if grid_size < 2 {
        return Err(Error::invalid("output grid needs at least two knots"));
    }
    if chain.dim() != d + 1 {
        return Err(Error::invalid("chain dimension does not match d"));
    }
    let denom = support_len + F::from_count(d) * tau;
    let scale = F::one() / F::from_count(d + 1);
    let gm1 = F::from_count(grid_size - 1);
    let mut times = Vec::with_capacity(grid_size);
    let mut values = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let t = support_len * (F::from_count(i) / gm1);
        let v = if i == 0 || i == grid_size - 1 {
            F::zero()
        } else {
            let mut sum = F::zero();
            for k in 1..=d + 1 {
                let alpha = (t + F::from_count(d + 1 - k) * tau) / denom;
                sum = sum + quantile_point(chain, quantile, alpha)[k - 1];
            }
            sum * scale
        };
        times.push(t);
        values.push(v);
    }
    let pulse = PulseSignal::new(times, values, Interp::Linear).map_err(|e| {
        Error::InsufficientData { stage: Stage::Assembly, detail: e.to_string() }
    })?;
    Ok(PulseEstimate { pulse })
}

/// Exact-data reference reconstruction.
///
/// Samples the curve of `pulse` at `m` start times placed at the uniform
/// quantile positions `(j - 0.5)/m` of the start-time range, builds the
/// chain in that (known) order, takes the exact coordinate fractions, and
/// assembles the pulse on an `m`-knot grid. As `m` grows this converges to
/// the input pulse, which is what makes it a reference for the
/// train-based estimator.
pub fn reconstruct_from_curve<F: Float>(
    pulse: &PulseSignal<F>,
    d: usize,
    tau: F,
    m: usize,
) -> Result<PulseEstimate<F>> {
    if m < 3 {
        return Err(Error::invalid("need at least 3 curve samples"));
    }
    let cfg = SamplingConfig::new(d, tau)?;
    let support = pulse.support_len();
    let lo = -cfg.train_span();
    let width = support + cfg.train_span();
    let mf = F::from_count(m);
    let half = F::cast(0.5);
    let rows: Vec<Vec<F>> = (1..=m)
        .map(|j| {
            let alpha = (F::from_count(j) - half) / mf;
            sample_train(pulse, lo + alpha * width, &cfg).values().to_vec()
        })
        .collect();
    let cloud = PointCloud::from_rows(rows)
        .map_err(|_| Error::invalid("curve sampling produced a zero train; increase m"))?;
    let chain = PolygonalChain::new(&cloud)?;
    let quantile = QuantileEstimate::from_chain(&chain);
    let alphas = AlphaEstimates::exact(d, tau, support);
    let support_hat = estimate_support_len(&alphas, d, tau)?;
    assemble_pulse(&chain, &quantile, support_hat, d, tau, m)
}

/// Options for [`reconstruct_from_trains`].
#[derive(Debug, Clone, Copy)]
pub struct ReconOptions<F> {
    /// Magnitude below which a coordinate counts as zero.
    pub axis_epsilon: F,
    /// Number of knots of the assembled pulse.
    pub grid_size: usize,
}

impl<F: Float> Default for ReconOptions<F> {
    fn default() -> Self {
        Self { axis_epsilon: F::zero(), grid_size: 512 }
    }
}

/// Everything the train-based reconstruction produces besides the pulse:
/// kept for diagnostics and file dumps.
#[derive(Debug, Clone)]
pub struct TrainReconstruction<F> {
    pub estimate: PulseEstimate<F>,
    pub support_len: F,
    /// The input points in recovered curve order.
    pub ordered: PointCloud<F>,
    pub chain: PolygonalChain<F>,
    pub quantile: QuantileEstimate<F>,
    pub alphas: AlphaEstimates<F>,
}

fn as_stage_failure(e: Error) -> Error {
    match e {
        Error::NoAxisPoint { .. } => Error::InsufficientData {
            stage: Stage::Orientation,
            detail: e.to_string(),
        },
        other => other,
    }
}

/// Reconstruct a pulse from a finite set of nonzero sample trains.
///
/// Pipeline: order the trains along their curve, orient the chain, build
/// the origin-capped chain and its quantile function, estimate the support
/// length from the coordinate on/off fractions, then assemble the pulse.
/// Any stage may stop the run with [`Error::InsufficientData`]; a
/// coordinate that is zero across all trains stops it with
/// [`Error::MissingCoordinateData`].
pub fn reconstruct_from_trains<F: Float>(
    cloud: &PointCloud<F>,
    tau: F,
    opts: &ReconOptions<F>,
) -> Result<TrainReconstruction<F>> {
    if cloud.dim() < 2 {
        return Err(Error::invalid("trains must have at least 2 samples"));
    }
    let d = cloud.dim() - 1;
    let cyclic = nn_crust(cloud)?;
    let ordering = orient(cloud, &cyclic, opts.axis_epsilon).map_err(as_stage_failure)?;
    let ordered = cloud.reordered(ordering.perm());
    let chain = PolygonalChain::new(&ordered).map_err(as_stage_failure)?;
    let quantile = QuantileEstimate::from_chain(&chain);
    let alphas = AlphaEstimates::from_ordered(&ordered, opts.axis_epsilon)?;
    let support_len = estimate_support_len(&alphas, d, tau)?;
    if !support_len.is_finite() || support_len <= F::zero() {
        return Err(Error::InsufficientData {
            stage: Stage::SupportLen,
            detail: format!("nonpositive support estimate {support_len}"),
        });
    }
    let estimate = assemble_pulse(&chain, &quantile, support_len, d, tau, opts.grid_size)?;
    Ok(TrainReconstruction { estimate, support_len, ordered, chain, quantile, alphas })
}
