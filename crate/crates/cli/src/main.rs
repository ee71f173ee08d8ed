//! Experiment CLI: reconstruct pulses from train dumps, run the exact-data
//! reference, and drive Monte Carlo convergence studies.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use pulserecon::experiment::{run_experiment, summarize, ExperimentConfig};
use pulserecon::io;
use pulserecon::metrics::rmse;
use pulserecon::pulse::PulseSignal;
use pulserecon::recon::{reconstruct_from_curve, reconstruct_from_trains, ReconOptions};
use pulserecon::train::SamplingMode;

#[derive(Parser)]
#[command(name = "pulserecon", version, about = "Pulse-shape reconstruction from short sample trains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a pulse from a CSV of sample trains (one train per row,
    /// d+1 columns, no header).
    Reconstruct(ReconstructArgs),
    /// Run the Monte Carlo experiment grid and write report/summary CSVs.
    Simulate(SimulateArgs),
    /// Run the exact-data reference reconstruction on a pulse fixture and
    /// report its error against that fixture.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ReconstructArgs {
    /// Train dump to reconstruct from.
    #[arg(long)]
    trains: PathBuf,
    /// Sample spacing of the trains, in seconds.
    #[arg(long)]
    tau: f64,
    /// Magnitude below which a coordinate counts as zero.
    #[arg(long, default_value_t = 0.0)]
    axis_epsilon: f64,
    /// Knots of the reconstructed pulse.
    #[arg(long, default_value_t = 512)]
    grid_size: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also dump the ordered chain (one point per row, in curve order).
    #[arg(long)]
    dump_chain: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment configuration JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pulse fixture CSV (default: built-in two-lobe bump).
    #[arg(long)]
    pulse: Option<PathBuf>,
    /// Train length parameters d (comma separated).
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    /// Sample spacing as a fraction of the pulse length.
    #[arg(long)]
    tau_frac: Option<f64>,
    /// Pulse recurrence counts (comma separated).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Trials per (d, n) cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Sampling mode: direct | stream.
    #[arg(long)]
    mode: Option<SamplingMode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports.csv and summary.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Pulse fixture CSV (default: built-in two-lobe bump).
    #[arg(long)]
    pulse: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Sample spacing as a fraction of the pulse length.
    #[arg(long, default_value_t = 0.16)]
    tau_frac: f64,
    /// Number of curve samples (also the output grid size).
    #[arg(long, default_value_t = 10_000)]
    m: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Optional file form of the simulate configuration: the experiment fields
/// plus the pulse fixture and output directory.
#[derive(Deserialize)]
struct ConfigFile {
    #[serde(flatten)]
    experiment: ExperimentConfig,
    pulse: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn load_pulse(path: &Option<PathBuf>) -> Result<PulseSignal<f64>> {
    match path {
        Some(p) => io::read_pulse_fixture(p).with_context(|| format!("reading pulse fixture {}", p.display())),
        None => Ok(PulseSignal::two_lobe()),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<()> {
    let cloud = io::read_trains(&args.trains)
        .with_context(|| format!("reading trains from {}", args.trains.display()))?;
    if cloud.dim() < 2 {
        bail!("trains must have at least two columns");
    }
    let d = cloud.dim() - 1;
    let opts = ReconOptions { axis_epsilon: args.axis_epsilon, grid_size: args.grid_size };
    let rec = reconstruct_from_trains(&cloud, args.tau, &opts)
        .context("reconstruction stopped")?;
    ensure_dir(&args.out)?;
    let meta = io::EstimateMeta {
        tp_hat: rec.support_len,
        n_trains: cloud.len(),
        d,
        tau: args.tau,
    };
    let out_csv = args.out.join("pulse_hat.csv");
    io::write_estimate(&out_csv, &rec.estimate, &meta)?;
    if let Some(chain_path) = &args.dump_chain {
        io::write_cloud(chain_path, &rec.ordered)?;
    }
    println!(
        "reconstructed pulse from {} trains (d={d}, tau={}): Tp_hat={:.6}, wrote {}",
        cloud.len(),
        args.tau,
        rec.support_len,
        out_csv.display()
    );
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (mut cfg, mut pulse_path, mut out_dir) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: ConfigFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            (file.experiment, file.pulse, file.out)
        }
        None => (ExperimentConfig::default(), None, None),
    };
    if let Some(d) = &args.d {
        cfg.d_values = d.clone();
    }
    if let Some(n) = &args.n {
        cfg.n_values = n.clone();
    }
    if let Some(t) = args.tau_frac {
        cfg.tau_frac = t;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.pulse.is_some() {
        pulse_path = args.pulse.clone();
    }
    let out = out_dir.take().filter(|_| args.out == Path::new(".")).unwrap_or_else(|| args.out.clone());

    let pulse = load_pulse(&pulse_path)?;
    let reports = run_experiment(&pulse, &cfg).context("running experiment")?;
    let cells = summarize(&reports);
    ensure_dir(&out)?;
    io::write_reports(&out.join("reports.csv"), &reports)?;
    io::write_summary(&out.join("summary.csv"), &cells)?;
    println!(
        "ran {} cells x {} trials ({} mode, seed {}): wrote {}/reports.csv and summary.csv",
        cells.len(),
        cfg.trials,
        cfg.mode,
        cfg.seed,
        out.display()
    );
    for c in &cells {
        println!(
            "  d={} n={}: fail_prob={:.3} median_rmse={}",
            c.d,
            c.n,
            c.fail_prob,
            if c.median_rmse.is_nan() { "-".to_string() } else { format!("{:.5}", c.median_rmse) }
        );
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let pulse = load_pulse(&args.pulse)?;
    let tau = args.tau_frac * pulse.support_len();
    let est = reconstruct_from_curve(&pulse, args.d, tau, args.m)
        .context("reference reconstruction failed")?;
    ensure_dir(&args.out)?;
    let meta = io::EstimateMeta {
        tp_hat: est.support_len(),
        n_trains: args.m,
        d: args.d,
        tau,
    };
    let out_csv = args.out.join("pulse_hat.csv");
    io::write_estimate(&out_csv, &est, &meta)?;
    let err = rmse(&pulse, &est, 4096);
    let sup = (0..=20_000)
        .map(|i| {
            let t = i as f64 * pulse.support_len().max(est.support_len()) / 20_000.0;
            (pulse.eval(t) - est.eval(t)).abs()
        })
        .fold(0.0f64, f64::max);
    println!(
        "exact-data reference (d={}, tau={tau:.6}, m={}): Tp_hat={:.9}, rmse={err:.3e}, sup_err={sup:.3e}, wrote {}",
        args.d,
        args.m,
        est.support_len(),
        out_csv.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}
