//! CSV and JSON emission of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::{HarnessError, Result};
use crate::harness::SweepResult;

pub const SUMMARY_HEADER: &str = "x,method,mean_sinr_db,std_db,n_ok";
pub const RAW_HEADER: &str = "x,method,trial,sinr_db";

/// `foo.csv` -> `foo_raw.csv`.
pub fn raw_path(path: &Path) -> PathBuf {
    sibling(path, "raw", "csv")
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn summary_csv(result: &SweepResult) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (xi, x) in result.x_values.iter().enumerate() {
        for s in &result.series {
            let p = &s.points[xi];
            let _ = writeln!(out, "{x},{},{},{},{}", s.method, p.mean_db, p.std_db, p.n_ok);
        }
    }
    out
}

pub fn raw_csv(result: &SweepResult) -> String {
    let mut out = String::from(RAW_HEADER);
    out.push('\n');
    for (xi, x) in result.x_values.iter().enumerate() {
        for s in &result.series {
            for (t, v) in s.points[xi].raw.iter().enumerate() {
                let v = v.unwrap_or(f64::NAN);
                let _ = writeln!(out, "{x},{},{t},{v}", s.method);
            }
        }
    }
    out
}

/// Writes the per-(x, method) summary to `path` and per-trial values to its `_raw` sibling.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write(path, &summary_csv(result))?;
    write(&raw_path(path), &raw_csv(result))
}

pub fn beampattern_csv(result: &SweepResult) -> String {
    let mut out = String::from("angle_deg,method,gain_db\n");
    for (method, curve) in &result.beampatterns {
        for (a, g) in curve.angles.iter().zip(&curve.gains_db) {
            let _ = writeln!(out, "{},{method},{g}", a.to_degrees());
        }
    }
    out
}

pub fn diagnostics_json(result: &SweepResult) -> String {
    let failures: Vec<_> = result
        .failures
        .iter()
        .map(|f| {
            json!({
                "x": result.x_values[f.x_index],
                "trial": f.trial,
                "method": f.method.map(|m| m.name()),
                "message": f.message,
            })
        })
        .collect();
    let value = json!({
        "experiment": result.experiment.name(),
        "x_label": result.x_label,
        "l_histogram": result.diagnostics.l_histogram.iter().map(|(l, n)| json!({"l": l, "trials": n})).collect::<Vec<_>>(),
        "epsilon_n": result.diagnostics.epsilon_n,
        "dominance_violations": result.dominance_violations,
        "failures": failures,
    });
    serde_json::to_string_pretty(&value).expect("diagnostics serialize") + "\n"
}

/// Writes every artifact of `result` into `dir`; returns the written paths.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let summary = dir.join(format!("{}.csv", result.experiment.name()));
    emit_csv(result, &summary)?;
    let mut written = vec![summary.clone(), raw_path(&summary)];
    if !result.beampatterns.is_empty() {
        let path = sibling(&summary, "curves", "csv");
        write(&path, &beampattern_csv(result))?;
        written.push(path);
    }
    let path = sibling(&summary, "diagnostics", "json");
    write(&path, &diagnostics_json(result))?;
    written.push(path);
    Ok(written)
}
