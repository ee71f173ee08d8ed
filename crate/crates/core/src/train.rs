//! Sample trains: `d+1` equally spaced samples of a pulse or stream,
//! treated as points in `(d+1)`-dimensional space.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::Float;
use crate::pulse::PulseSignal;
use crate::stream::PulseStream;

/// How trains are acquired from a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// One train per pulse at an independent uniform start time.
    Direct,
    /// Uniform sampling of the whole stream at period `tau` with a random
    /// grid phase; every nonzero length-`d+1` window is kept.
    Stream,
}

impl std::str::FromStr for SamplingMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(SamplingMode::Direct),
            "stream" => Ok(SamplingMode::Stream),
            other => Err(format!("unknown sampling mode {other:?} (expected direct|stream)")),
        }
    }
}

impl std::fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplingMode::Direct => "direct",
            SamplingMode::Stream => "stream",
        })
    }
}

/// Sampling parameters: trains have `d+1` samples spaced `tau` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig<F> {
    d: usize,
    tau: F,
    pub mode: SamplingMode,
    /// A coordinate is "on axis"/"zero" when its magnitude is <= this.
    pub axis_epsilon: F,
}

impl<F: Float> SamplingConfig<F> {
    pub fn new(d: usize, tau: F) -> Result<Self> {
        if d < 1 {
            return Err(Error::invalid("train length parameter d must be >= 1"));
        }
        if !(tau.is_finite() && tau > F::zero()) {
            return Err(Error::invalid("sample spacing tau must be positive"));
        }
        Ok(Self { d, tau, mode: SamplingMode::Direct, axis_epsilon: F::zero() })
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_axis_epsilon(mut self, eps: F) -> Result<Self> {
        if !(eps.is_finite() && eps >= F::zero()) {
            return Err(Error::invalid("axis epsilon must be nonnegative"));
        }
        self.axis_epsilon = eps;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tau(&self) -> F {
        self.tau
    }

    /// Time span `d*tau` covered by one train.
    pub fn train_span(&self) -> F {
        F::from_count(self.d) * self.tau
    }
}

/// A point in `(d+1)`-dimensional space: the samples
/// `[p(t), p(t+tau), ..., p(t+d*tau)]`, plus the start time when known.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrain<F> {
    values: Vec<F>,
    start: Option<F>,
}

impl<F: Float> SampleTrain<F> {
    pub fn from_values(values: Vec<F>) -> Self {
        Self { values, start: None }
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Start time of the train when the acquisition context provides one.
    pub fn start(&self) -> Option<F> {
        self.start
    }

    pub fn is_zero(&self, axis_epsilon: F) -> bool {
        self.values.iter().all(|v| v.abs() <= axis_epsilon)
    }
}

/// Sample one train of `pulse` starting at time `t`:
/// `values[k] = p(t + k*tau)` for `k = 0..=d`.
pub fn sample_train<F: Float>(pulse: &PulseSignal<F>, t: F, cfg: &SamplingConfig<F>) -> SampleTrain<F> {
    let values = (0..=cfg.d())
        .map(|k| pulse.eval(t + F::from_count(k) * cfg.tau()))
        .collect();
    SampleTrain { values, start: Some(t) }
}

/// Extract nonzero sample trains from a stream, per `cfg.mode`.
///
/// Fails when the stream's inter-pulse gap is smaller than the train span
/// `d*tau`: windows could then mix two pulses and would no longer be
/// trains of the underlying pulse.
pub fn extract_trains<F: Float>(
    stream: &PulseStream<F>,
    cfg: &SamplingConfig<F>,
    seed: u64,
) -> Result<Vec<SampleTrain<F>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    extract_trains_with(stream, cfg, &mut rng)
}

/// Like [`extract_trains`] but drawing from a caller-provided generator.
pub fn extract_trains_with<F: Float, R: Rng>(
    stream: &PulseStream<F>,
    cfg: &SamplingConfig<F>,
    rng: &mut R,
) -> Result<Vec<SampleTrain<F>>> {
    let gap = stream.inter_pulse_gap();
    let span = cfg.train_span();
    if gap < span {
        return Err(Error::PulsesTooClose {
            gap: gap.to_f64().unwrap_or(f64::NAN),
            span: span.to_f64().unwrap_or(f64::NAN),
        });
    }
    match cfg.mode {
        SamplingMode::Stream => {
            let u: f64 = rng.random();
            let phase = F::cast(u) * cfg.tau();
            Ok(stream_windows(stream, cfg, phase))
        }
        SamplingMode::Direct => Ok(uniform_start_trains_with(stream.pulse(), stream.len(), cfg, rng)),
    }
}

/// One train per pulse at an independent uniform start time in
/// `(-d*tau, T)`; all-zero trains are discarded.
pub fn uniform_start_trains<F: Float>(
    pulse: &PulseSignal<F>,
    n: usize,
    cfg: &SamplingConfig<F>,
    seed: u64,
) -> Vec<SampleTrain<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_start_trains_with(pulse, n, cfg, &mut rng)
}

pub fn uniform_start_trains_with<F: Float, R: Rng>(
    pulse: &PulseSignal<F>,
    n: usize,
    cfg: &SamplingConfig<F>,
    rng: &mut R,
) -> Vec<SampleTrain<F>> {
    let lo = -cfg.train_span();
    let width = pulse.support_len() + cfg.train_span();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            sample_train(pulse, lo + F::cast(u) * width, cfg)
        })
        .filter(|tr| !tr.is_zero(cfg.axis_epsilon))
        .collect()
}

/// Deterministic core of stream-mode extraction: sample the stream on the
/// grid `phase + j*tau`, slide a window of `d+1` samples with stride one
/// sample, and keep every window with an entry of magnitude above
/// `axis_epsilon`. Each kept train records its absolute start time.
pub fn stream_windows<F: Float>(
    stream: &PulseStream<F>,
    cfg: &SamplingConfig<F>,
    phase: F,
) -> Vec<SampleTrain<F>> {
    let d = cfg.d();
    let tau = cfg.tau();
    let first = stream.onsets()[0] - cfg.train_span();
    let last = *stream.onsets().last().unwrap() + stream.pulse().support_len();
    // Window starts s_j = phase + j*tau covering (first - tau, last).
    let j_lo = ((first - phase) / tau).floor().to_i64().unwrap() - 1;
    let j_hi = ((last - phase) / tau).ceil().to_i64().unwrap() + 1;
    let count = (j_hi - j_lo + 1).max(0) as usize;
    let samples: Vec<F> = (0..count + d)
        .map(|i| stream.eval(phase + F::cast((j_lo + i as i64) as f64) * tau))
        .collect();
    samples
        .windows(d + 1)
        .enumerate()
        .filter(|(_, w)| w.iter().any(|v| v.abs() > cfg.axis_epsilon))
        .map(|(i, w)| SampleTrain {
            values: w.to_vec(),
            start: Some(phase + F::cast((j_lo + i as i64) as f64) * tau),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(d: usize, tau: f64) -> SamplingConfig<f64> {
        SamplingConfig::new(d, tau).unwrap()
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(SamplingConfig::<f64>::new(0, 0.16).is_err());
        assert!(SamplingConfig::<f64>::new(2, 0.0).is_err());
        assert!(SamplingConfig::<f64>::new(2, 0.16).unwrap().with_axis_epsilon(-1.0).is_err());
    }

    #[test]
    fn train_of_triangle_at_interior_start() {
        let p = PulseSignal::<f64>::triangle();
        let tr = sample_train(&p, 0.1, &cfg(2, 0.3));
        let expect = [0.2, 0.8, 0.6];
        for (v, e) in tr.values().iter().zip(expect) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn train_with_leading_zeros_lies_on_last_axis() {
        let p = PulseSignal::<f64>::triangle();
        let tr = sample_train(&p, -0.5, &cfg(2, 0.3));
        assert_eq!(tr.values()[0], 0.0);
        assert_eq!(tr.values()[1], 0.0);
        assert_relative_eq!(tr.values()[2], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn train_outside_window_is_zero() {
        let p = PulseSignal::<f64>::triangle();
        let tr = sample_train(&p, -0.9, &cfg(2, 0.3));
        assert!(tr.is_zero(0.0));
        let tr = sample_train(&p, 1.0, &cfg(2, 0.3));
        assert!(tr.is_zero(0.0));
    }

    /// Window enumeration oracle, worked by hand: one triangle pulse at
    /// onset 0, d = 2, tau = 0.3, grid phase 0.1. The sample grid is
    /// ..., -0.5, -0.2, 0.1, 0.4, 0.7, 1.0, ...; exactly the windows
    /// starting at -0.5, -0.2, 0.1, 0.4, 0.7 contain a nonzero sample.
    /// The small epsilon absorbs the roundoff of the grid times (the
    /// sample near t = 1.0 evaluates to ~2e-16, not exactly 0).
    #[test]
    fn stream_windows_match_hand_enumeration() {
        let p = PulseSignal::<f64>::triangle();
        let stream = PulseStream::new(p, vec![0.0]).unwrap();
        let c = cfg(2, 0.3).with_axis_epsilon(1e-12).unwrap();
        let got = stream_windows(&stream, &c, 0.1);
        let expect: [(f64, [f64; 3]); 5] = [
            (-0.5, [0.0, 0.0, 0.2]),
            (-0.2, [0.0, 0.2, 0.8]),
            (0.1, [0.2, 0.8, 0.6]),
            (0.4, [0.8, 0.6, 0.0]),
            (0.7, [0.6, 0.0, 0.0]),
        ];
        assert_eq!(got.len(), expect.len());
        for (tr, (start, vals)) in got.iter().zip(expect) {
            assert_relative_eq!(tr.start().unwrap(), start, epsilon = 1e-9);
            for (v, e) in tr.values().iter().zip(vals) {
                assert_relative_eq!(*v, e, epsilon = 1e-9);
            }
        }
    }

    /// Every extracted stream-mode train must equal a train of the single
    /// pulse at the window's start time relative to the covering onset.
    #[test]
    fn stream_trains_coincide_with_pulse_trains() {
        let p = PulseSignal::<f64>::two_lobe();
        let c = cfg(2, 0.16).with_mode(SamplingMode::Stream);
        let law = crate::stream::GapLaw::default_for(2, 0.16, 1.0);
        let stream = crate::stream::synth_stream(&p, 6, &law, &c, 5).unwrap();
        let trains = extract_trains(&stream, &c, 99).unwrap();
        assert!(!trains.is_empty());
        for tr in &trains {
            let s = tr.start().unwrap();
            let rel = stream
                .onsets()
                .iter()
                .map(|&o| s - o)
                .find(|&t| t > -c.train_span() && t < p.support_len())
                .expect("nonzero train must overlap some pulse");
            let reference = sample_train(&p, rel, &c);
            for (a, b) in tr.values().iter().zip(reference.values()) {
                assert_relative_eq!(*a, *b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn direct_mode_returns_at_most_n_trains() {
        let p = PulseSignal::<f64>::two_lobe();
        let c = cfg(2, 0.16);
        let trains = uniform_start_trains(&p, 64, &c, 3);
        assert!(trains.len() <= 64);
        assert!(trains.iter().all(|tr| !tr.is_zero(0.0)));
    }

    #[test]
    fn overlapping_pulses_are_rejected() {
        let p = PulseSignal::<f64>::triangle();
        // Gap 0.2 < train span 0.6.
        let stream = PulseStream::new(p, vec![0.0, 1.2]).unwrap();
        let c = cfg(2, 0.3).with_mode(SamplingMode::Stream);
        assert!(matches!(
            extract_trains(&stream, &c, 0),
            Err(Error::PulsesTooClose { .. })
        ));
    }

    #[test]
    fn empty_stream_region_contributes_no_trains() {
        let p = PulseSignal::<f64>::triangle();
        let stream = PulseStream::new(p, vec![0.0, 10.0]).unwrap();
        let c = cfg(2, 0.3).with_mode(SamplingMode::Stream);
        let trains = extract_trains(&stream, &c, 17).unwrap();
        // Every train overlaps one of the two pulses; the long quiet span
        // in between yields nothing.
        for tr in &trains {
            let s = tr.start().unwrap();
            let near = (s > -0.6 && s < 1.0) || (s > 9.4 && s < 11.0);
            assert!(near, "train at {s} comes from a quiet region");
        }
        assert!(trains.len() >= 8);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Slice identity: coordinate k of the train starting at
        /// t - k*tau equals the pulse at t.
        #[test]
        fn slice_identity(t in -2.0f64..3.0, k in 0usize..3, tau in 0.05f64..0.5) {
            let p = PulseSignal::<f64>::two_lobe();
            let c = SamplingConfig::new(2, tau).unwrap();
            let tr = sample_train(&p, t - k as f64 * tau, &c);
            prop_assert!((tr.values()[k] - p.eval(t)).abs() < 1e-12);
        }

        /// A train is all zero iff no sample index lands inside the
        /// support; in particular for t <= -d*tau and t >= T.
        #[test]
        fn zero_train_iff_no_sample_in_support(t in -3.0f64..4.0) {
            let p = PulseSignal::<f64>::triangle();
            let c = SamplingConfig::new(2, 0.3).unwrap();
            let tr = sample_train(&p, t, &c);
            let any_inside = (0..=2).any(|k| {
                let s = t + k as f64 * 0.3;
                s > 0.0 && s < 1.0 && p.eval(s) != 0.0
            });
            prop_assert_eq!(!tr.is_zero(0.0), any_inside);
            if t <= -0.6 || t >= 1.0 {
                prop_assert!(tr.is_zero(0.0));
            }
        }
    }
}
