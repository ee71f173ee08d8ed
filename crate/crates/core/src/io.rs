//! File formats: pulse fixtures, train dumps, experiment reports.
//!
//! Pulse fixtures are `t,value` CSV knot lists with a JSON sidecar
//! (same path, `.json` extension) selecting the interpolation rule.
//! Train dumps are header-less CSV, one train per row, written with 17
//! significant digits. Reconstructed pulses are `t,value` CSV plus a JSON
//! metadata sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{CellSummary, TrialOutcome, TrialReport};
use crate::ordering::PointCloud;
use crate::pulse::{Interp, PulseSignal};
use crate::recon::PulseEstimate;
use crate::train::SampleTrain;

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

#[derive(Serialize, Deserialize)]
struct PulseSidecar {
    interp: Interp,
}

/// Metadata written next to a reconstructed pulse.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateMeta {
    #[serde(rename = "Tp_hat")]
    pub tp_hat: f64,
    pub n_trains: usize,
    pub d: usize,
    pub tau: f64,
}

fn parse_f64(field: &str, path: &Path, line_no: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        Error::invalid(format!(
            "{}:{}: cannot parse number {:?}",
            path.display(),
            line_no,
            field
        ))
    })
}

/// Write pulse knots as `t,value` CSV plus the interpolation sidecar.
pub fn write_pulse_fixture(csv_path: &Path, pulse: &PulseSignal<f64>) -> Result<()> {
    let mut out = String::from("t,value\n");
    for (&t, &v) in pulse.knot_times().iter().zip(pulse.knot_values()) {
        out.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    fs::write(csv_path, out)?;
    let sidecar = serde_json::to_string_pretty(&PulseSidecar { interp: pulse.interp() })?;
    fs::write(sidecar_path(csv_path), sidecar)?;
    Ok(())
}

/// Read a pulse fixture (knots CSV + optional sidecar; a missing sidecar
/// means linear interpolation).
pub fn read_pulse_fixture(csv_path: &Path) -> Result<PulseSignal<f64>> {
    let text = fs::read_to_string(csv_path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            let header = line.trim().to_lowercase();
            if header != "t,value" {
                return Err(Error::invalid(format!(
                    "{}: expected header 't,value', got {:?}",
                    csv_path.display(),
                    line
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::invalid(format!(
                "{}:{}: expected two fields",
                csv_path.display(),
                i + 1
            )));
        };
        times.push(parse_f64(t, csv_path, i + 1)?);
        values.push(parse_f64(v, csv_path, i + 1)?);
    }
    let interp = match fs::read_to_string(sidecar_path(csv_path)) {
        Ok(json) => serde_json::from_str::<PulseSidecar>(&json)?.interp,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Interp::Linear,
        Err(e) => return Err(e.into()),
    };
    PulseSignal::new(times, values, interp)
}

/// Dump trains as header-less CSV, one train per row, 17 significant
/// digits per sample.
pub fn write_trains(path: &Path, trains: &[SampleTrain<f64>]) -> Result<()> {
    let mut out = String::new();
    for tr in trains {
        let row: Vec<String> = tr.values().iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a train dump into a point cloud; the train length is taken from
/// the first row.
pub fn read_trains(path: &Path) -> Result<PointCloud<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|f| parse_f64(f, path, i + 1))
            .collect();
        rows.push(row?);
    }
    PointCloud::from_rows(rows)
}

/// Dump a point cloud (used for ordered-chain diagnostics), one point per
/// row in the given order.
pub fn write_cloud(path: &Path, cloud: &PointCloud<f64>) -> Result<()> {
    let mut out = String::new();
    for p in cloud.iter_points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write a reconstructed pulse: `t,value` knots CSV plus JSON metadata
/// sidecar.
pub fn write_estimate(csv_path: &Path, estimate: &PulseEstimate<f64>, meta: &EstimateMeta) -> Result<()> {
    let mut out = String::from("t,value\n");
    let p = estimate.pulse();
    for (&t, &v) in p.knot_times().iter().zip(p.knot_values()) {
        out.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    fs::write(csv_path, out)?;
    fs::write(sidecar_path(csv_path), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

/// Write per-trial reports: `d,n,trial,outcome,tp_hat,rmse`, with empty
/// numeric fields on failed trials.
pub fn write_reports(path: &Path, reports: &[TrialReport]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "d,n,trial,outcome,tp_hat,rmse")?;
    for r in reports {
        match &r.outcome {
            TrialOutcome::Ok { support_len, rmse } => {
                writeln!(file, "{},{},{},ok,{support_len},{rmse}", r.d, r.n, r.trial)?;
            }
            TrialOutcome::Failed { stage } => {
                writeln!(file, "{},{},{},failed:{stage},,", r.d, r.n, r.trial)?;
            }
        }
    }
    Ok(())
}

/// Write per-cell summaries.
pub fn write_summary(path: &Path, cells: &[CellSummary]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(
        file,
        "d,n,trials,failures,fail_prob,median_rmse,q1_rmse,q3_rmse,iqr_rmse,whisker_lo,whisker_hi"
    )?;
    let fmt = |x: f64| if x.is_nan() { String::new() } else { format!("{x}") };
    for c in cells {
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.d,
            c.n,
            c.trials,
            c.failures,
            c.fail_prob,
            fmt(c.median_rmse),
            fmt(c.q1_rmse),
            fmt(c.q3_rmse),
            fmt(c.iqr_rmse),
            fmt(c.whisker_lo),
            fmt(c.whisker_hi),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::{uniform_start_trains, SamplingConfig};
    use approx::assert_relative_eq;

    #[test]
    fn pulse_fixture_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.csv");
        let p = PulseSignal::<f64>::two_lobe();
        write_pulse_fixture(&path, &p).unwrap();
        let q = read_pulse_fixture(&path).unwrap();
        assert_eq!(p.interp(), q.interp());
        assert_eq!(p.knot_times(), q.knot_times());
        assert_eq!(p.knot_values(), q.knot_values());
    }

    #[test]
    fn missing_sidecar_defaults_to_linear() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.csv");
        fs::write(&path, "t,value\n0,0\n0.5,1\n1,0\n").unwrap();
        let p = read_pulse_fixture(&path).unwrap();
        assert_eq!(p.interp(), Interp::Linear);
        assert_relative_eq!(p.eval(0.25), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn trains_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trains.csv");
        let p = PulseSignal::<f64>::two_lobe();
        let cfg = SamplingConfig::new(2, 0.16).unwrap();
        let trains = uniform_start_trains(&p, 50, &cfg, 3);
        write_trains(&path, &trains).unwrap();
        let cloud = read_trains(&path).unwrap();
        assert_eq!(cloud.len(), trains.len());
        for (i, tr) in trains.iter().enumerate() {
            // 17 significant digits round-trip f64 exactly.
            assert_eq!(cloud.point(i), tr.values());
        }
    }

    #[test]
    fn malformed_fixture_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "time,amp\n0,0\n1,0\n").unwrap();
        assert!(read_pulse_fixture(&path).is_err());
        fs::write(&path, "t,value\n0,zero\n1,0\n").unwrap();
        assert!(read_pulse_fixture(&path).is_err());
    }
}
