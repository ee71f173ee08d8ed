//! Reconstruction quality metrics.

use crate::float::Float;
use crate::pulse::PulseSignal;
use crate::recon::PulseEstimate;

/// Default number of quadrature nodes for [`rmse`].
pub const DEFAULT_QUAD_POINTS: usize = 4096;

/// Root-mean-square error between a pulse and its estimate, normalized
/// over the longer of the two supports:
/// `sqrt( (1/T) * integral_0^T (p - p_hat)^2 )` with
/// `T = max(support, estimated support)`, both signals taken with their
/// zero extensions. Composite trapezoid rule on `quad_points` uniform
/// nodes.
pub fn rmse<F: Float>(pulse: &PulseSignal<F>, estimate: &PulseEstimate<F>, quad_points: usize) -> F {
    let t_max = pulse.support_len().max(estimate.support_len());
    let n = quad_points.max(2);
    let h = t_max / F::from_count(n - 1);
    let sq = |i: usize| {
        let t = t_max * (F::from_count(i) / F::from_count(n - 1));
        let diff = pulse.eval(t) - estimate.eval(t);
        diff * diff
    };
    let mut sum = (sq(0) + sq(n - 1)) * F::cast(0.5);
    for i in 1..n - 1 {
        sum = sum + sq(i);
    }
    (sum * h / t_max).sqrt()
}
