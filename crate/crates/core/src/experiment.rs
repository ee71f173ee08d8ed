//! Monte Carlo driver: repeated reconstruction trials over a grid of
//! `(d, n)` cells, with per-trial outcome reports and summary statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{rmse, DEFAULT_QUAD_POINTS};
use crate::pulse::PulseSignal;
use crate::recon::{reconstruct_from_trains, ReconOptions};
use crate::stream::{synth_stream_with, GapLaw};
use crate::train::{extract_trains_with, SamplingConfig, SamplingMode};
use crate::ordering::PointCloud;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn default_quad_points() -> usize {
    DEFAULT_QUAD_POINTS
}

fn default_grid_size() -> usize {
    512
}

/// Full description of one experiment run. The entire output is a pure
/// function of this configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Sample-train length parameters to sweep (a train has `d+1` samples).
    pub d_values: Vec<usize>,
    /// Pulse recurrence counts to sweep.
    pub n_values: Vec<usize>,
    /// Sample spacing as a fraction of the pulse support length, in (0, 1).
    pub tau_frac: f64,
    /// Trials per `(d, n)` cell.
    pub trials: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if self.d_values.is_empty() || self.d_values.iter().any(|&d| d < 1) {
            return Err(Error::invalid("every d must be >= 1"));
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 1) {
            return Err(Error::invalid("every n must be >= 1"));
        }
        if !(self.tau_frac > 0.0 && self.tau_frac < 1.0) {
            return Err(Error::invalid("tau_frac must lie in (0, 1)"));
        }
        if self.quad_points < 2 || self.grid_size < 2 {
            return Err(Error::invalid("quad_points and grid_size must be >= 2"));
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d_values: vec![2],
            n_values: (5..=13).map(|e| 1usize << e).collect(), // 32 .. 8192
            tau_frac: 0.16,
            trials: 1000,
            mode: SamplingMode::Stream,
            seed: 0,
            quad_points: DEFAULT_QUAD_POINTS,
            grid_size: default_grid_size(),
        }
    }
}

/// Outcome of one reconstruction trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Ok { support_len: f64, rmse: f64 },
    Failed { stage: String },
}

/// One trial of one `(d, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub d: usize,
    pub n: usize,
    pub trial: usize,
    pub outcome: TrialOutcome,
}

/// Per-trial generator, derived from `(seed, d, n, trial)` so every cell
/// and trial is independently reproducible regardless of scheduling.
pub fn trial_rng(seed: u64, d: usize, n: usize, trial: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(d as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(n as u64).to_le_bytes());
    key[24..32].copy_from_slice(&(trial as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn run_trial(pulse: &PulseSignal<f64>, cfg: &ExperimentConfig, d: usize, n: usize, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, d, n, trial);
    let tau = cfg.tau_frac * pulse.support_len();
    let scfg = match SamplingConfig::new(d, tau) {
        Ok(c) => c.with_mode(cfg.mode),
        Err(e) => return TrialOutcome::Failed { stage: stage_of(&e) },
    };
    let trains = match cfg.mode {
        SamplingMode::Direct => {
            crate::train::uniform_start_trains_with(pulse, n, &scfg, &mut rng)
        }
        SamplingMode::Stream => {
            let law = GapLaw::default_for(d, tau, pulse.support_len());
            let stream = match synth_stream_with(pulse, n, &law, &scfg, &mut rng) {
                Ok(s) => s,
                Err(e) => return TrialOutcome::Failed { stage: stage_of(&e) },
            };
            match extract_trains_with(&stream, &scfg, &mut rng) {
                Ok(t) => t,
                Err(e) => return TrialOutcome::Failed { stage: stage_of(&e) },
            }
        }
    };
    let cloud = match PointCloud::from_trains(&trains) {
        Ok(c) => c,
        Err(_) => return TrialOutcome::Failed { stage: "ordering".into() },
    };
    let opts = ReconOptions { axis_epsilon: 0.0, grid_size: cfg.grid_size };
    match reconstruct_from_trains(&cloud, tau, &opts) {
        Ok(rec) => TrialOutcome::Ok {
            support_len: rec.support_len,
            rmse: rmse(pulse, &rec.estimate, cfg.quad_points),
        },
        Err(e) => TrialOutcome::Failed { stage: stage_of(&e) },
    }
}

fn stage_of(e: &Error) -> String {
    e.stage().map(|s| s.name().to_string()).unwrap_or_else(|| "input".into())
}

/// Run all trials of one `(d, n)` cell, in parallel. Reports come back
/// sorted by trial index.
pub fn run_cell(pulse: &PulseSignal<f64>, cfg: &ExperimentConfig, d: usize, n: usize) -> Vec<TrialReport> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| TrialReport {
            d,
            n,
            trial,
            outcome: run_trial(pulse, cfg, d, n, trial),
        })
        .collect()
}

/// Run the whole `(d, n)` grid; reports are sorted by `(d, n, trial)` so
/// the output does not depend on the grid order in the configuration.
pub fn run_experiment(pulse: &PulseSignal<f64>, cfg: &ExperimentConfig) -> Result<Vec<TrialReport>> {
    cfg.validate()?;
    let mut reports = Vec::with_capacity(cfg.d_values.len() * cfg.n_values.len() * cfg.trials);
    for &d in &cfg.d_values {
        for &n in &cfg.n_values {
            reports.extend(run_cell(pulse, cfg, d, n));
        }
    }
    reports.sort_by_key(|r| (r.d, r.n, r.trial));
    Ok(reports)
}

/// Summary statistics of one `(d, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    /// failures / trials.
    pub fail_prob: f64,
    /// Statistics over the successful trials' errors; NaN when every
    /// trial failed.
    pub median_rmse: f64,
    pub q1_rmse: f64,
    pub q3_rmse: f64,
    pub iqr_rmse: f64,
    /// Boxplot whiskers: extreme data within 1.5 IQR of the quartiles.
    pub whisker_lo: f64,
    pub whisker_hi: f64,
}

/// Linear-interpolation quantile of pre-sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * p;
            let j = h.floor() as usize;
            let g = h - h.floor();
            if j + 1 >= n {
                sorted[n - 1]
            } else {
                (1.0 - g) * sorted[j] + g * sorted[j + 1]
            }
        }
    }
}

/// Aggregate reports into per-cell summaries, ordered by `(d, n)`.
pub fn summarize(reports: &[TrialReport]) -> Vec<CellSummary> {
    use std::collections::BTreeMap;
    let mut cells: BTreeMap<(usize, usize), Vec<&TrialReport>> = BTreeMap::new();
    for r in reports {
        cells.entry((r.d, r.n)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((d, n), rs)| {
            let trials = rs.len();
            let mut errs: Vec<f64> = rs
                .iter()
                .filter_map(|r| match r.outcome {
                    TrialOutcome::Ok { rmse, .. } => Some(rmse),
                    TrialOutcome::Failed { .. } => None,
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let failures = trials - errs.len();
            let q1 = quantile_sorted(&errs, 0.25);
            let med = quantile_sorted(&errs, 0.5);
            let q3 = quantile_sorted(&errs, 0.75);
            let iqr = q3 - q1;
            let lo_fence = q1 - 1.5 * iqr;
            let hi_fence = q3 + 1.5 * iqr;
            let whisker_lo = errs.iter().copied().find(|&x| x >= lo_fence).unwrap_or(f64::NAN);
            let whisker_hi = errs.iter().rev().copied().find(|&x| x <= hi_fence).unwrap_or(f64::NAN);
            CellSummary {
                d,
                n,
                trials,
                failures,
                fail_prob: failures as f64 / trials as f64,
                median_rmse: med,
                q1_rmse: q1,
                q3_rmse: q3,
                iqr_rmse: iqr,
                whisker_lo,
                whisker_hi,
            }
        })
        .collect()
}
