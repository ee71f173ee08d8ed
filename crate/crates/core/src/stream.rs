//! Pulse streams: time-shifted copies of one pulse, with a guaranteed gap
//! between consecutive pulses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::pulse::PulseSignal;
use crate::train::SamplingConfig;

/// Continuous uniform law for the gap between the end of one pulse and the
/// onset of the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapLaw<F> {
    min: F,
    max: F,
}

impl<F: Float> GapLaw<F> {
    pub fn uniform(min: F, max: F) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min <= F::zero() || max < min {
            return Err(Error::invalid("gap law needs 0 < min <= max, finite"));
        }
        Ok(Self { min, max })
    }

    /// Default experiment law: `d*tau + T * U(0.1, 1.1)` where `T` is the
    /// pulse support length. Continuous gaps keep the pulses' fractional
    /// phase relative to the sampling grid uniform.
    pub fn default_for(d: usize, tau: F, support_len: F) -> Self {
        let span = F::from_count(d) * tau;
        Self {
            min: span + F::cast(0.1) * support_len,
            max: span + F::cast(1.1) * support_len,
        }
    }

    pub fn lower_bound(&self) -> F {
        self.min
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> F {
        let u: f64 = rng.random();
        self.min + F::cast(u) * (self.max - self.min)
    }
}

/// A superposition of copies of one pulse at strictly increasing onsets.
///
/// Consecutive supports never overlap: the minimum inter-pulse gap
/// (`min_i t_{i+1} - t_i - T`) is positive by construction.
#[derive(Debug, Clone)]
pub struct PulseStream<F> {
    pulse: PulseSignal<F>,
    onsets: Vec<F>,
}

impl<F: Float> PulseStream<F> {
    pub fn new(pulse: PulseSignal<F>, onsets: Vec<F>) -> Result<Self> {
        if onsets.is_empty() {
            return Err(Error::invalid("a stream needs at least one onset"));
        }
        if onsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("onsets must be strictly increasing"));
        }
        let stream = Self { pulse, onsets };
        let gap = stream.inter_pulse_gap();
        if gap <= F::zero() {
            return Err(Error::invalid("consecutive pulses overlap"));
        }
        Ok(stream)
    }

    pub fn pulse(&self) -> &PulseSignal<F> {
        &self.pulse
    }

    pub fn onsets(&self) -> &[F] {
        &self.onsets
    }

    pub fn len(&self) -> usize {
        self.onsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsets.is_empty()
    }

    /// Minimum gap between the end of one pulse and the next onset;
    /// `+inf` for a single-pulse stream.
    pub fn inter_pulse_gap(&self) -> F {
        let t = self.pulse.support_len();
        self.onsets
            .windows(2)
            .map(|w| w[1] - w[0] - t)
            .fold(F::infinity(), F::min)
    }

    /// Evaluate the stream at time `t`. Supports are disjoint, so at most
    /// the latest onset not after `t` can contribute.
    pub fn eval(&self, t: F) -> F {
        let i = self.onsets.partition_point(|&x| x <= t);
        if i == 0 {
            return F::zero();
        }
        self.pulse.eval(t - self.onsets[i - 1])
    }
}

/// Synthesize a stream of `n` pulses with i.i.d. gaps drawn from `gap_law`,
/// deterministic for a given `seed`. The first onset is at time zero.
///
/// Rejects gap laws whose lower bound is below the train span `d*tau`, so
/// extracted windows can never mix two pulses.
pub fn synth_stream<F: Float>(
    pulse: &PulseSignal<F>,
    n: usize,
    gap_law: &GapLaw<F>,
    cfg: &SamplingConfig<F>,
    seed: u64,
) -> Result<PulseStream<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synth_stream_with(pulse, n, gap_law, cfg, &mut rng)
}

/// Like [`synth_stream`] but drawing from a caller-provided generator.
pub fn synth_stream_with<F: Float, R: Rng>(
    pulse: &PulseSignal<F>,
    n: usize,
    gap_law: &GapLaw<F>,
    cfg: &SamplingConfig<F>,
    rng: &mut R,
) -> Result<PulseStream<F>> {
    if n == 0 {
        return Err(Error::invalid("a stream needs at least one pulse"));
    }
    let span = cfg.train_span();
    if gap_law.lower_bound() < span {
        return Err(Error::invalid(format!(
            "gap law lower bound {} is below the train span {}",
            gap_law.lower_bound(),
            span
        )));
    }
    let t = pulse.support_len();
    let mut onsets = Vec::with_capacity(n);
    let mut onset = F::zero();
    onsets.push(onset);
    for _ in 1..n {
        onset = onset + t + gap_law.draw(rng);
        onsets.push(onset);
    }
    PulseStream::new(pulse.clone(), onsets)
}
