use std::fs;
use std::process::Command;

use beamlab::output::{emit_csv, raw_path, write_outputs, RAW_HEADER, SUMMARY_HEADER};
use beamlab::{run_experiment, Experiment, ExperimentConfig, LSetting};
use beamlab_core::Method;

fn small(experiment: Experiment) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_experiment(experiment);
    cfg.trials = 6;
    cfg.seed = 99;
    cfg
}

#[test]
fn csv_row_counts_and_parse_back() {
    let cfg = small(Experiment::SinrVsSnr);
    let result = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    emit_csv(&result, &path).unwrap();

    let summary = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], SUMMARY_HEADER);
    assert_eq!(lines.len(), 1 + cfg.x_values().len() * cfg.methods.len());
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let x: f64 = f[0].parse().unwrap();
        let xi = result.x_values.iter().position(|&v| v == x).unwrap();
        let method: Method = f[1].parse().unwrap();
        let point = &result.series(method).unwrap().points[xi];
        let mean: f64 = f[2].parse().unwrap();
        assert!((mean - point.mean_db).abs() < 1e-9);
        assert_eq!(f[4].parse::<usize>().unwrap(), cfg.trials);
    }

    let raw = fs::read_to_string(raw_path(&path)).unwrap();
    let raw_lines: Vec<&str> = raw.lines().collect();
    assert_eq!(raw_lines[0], RAW_HEADER);
    assert_eq!(
        raw_lines.len(),
        1 + cfg.x_values().len() * cfg.methods.len() * cfg.trials
    );
    assert!(!summary.contains('\r'));
}

#[test]
fn summary_statistics_match_raw_values() {
    let result = run_experiment(&small(Experiment::SinrVsInr)).unwrap();
    for series in &result.series {
        for p in &series.points {
            let v: Vec<f64> = p.raw.iter().flatten().copied().collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            assert!((mean - p.mean_db).abs() < 1e-12);
            assert!((var.sqrt() - p.std_db).abs() < 1e-12);
        }
    }
}

#[test]
fn parallel_and_serial_runs_agree() {
    let mut cfg = small(Experiment::SinrVsSnapshots);
    cfg.workers = 4;
    let parallel = run_experiment(&cfg).unwrap();
    cfg.workers = 1;
    let serial = run_experiment(&cfg).unwrap();
    assert_eq!(parallel, serial);
}

#[test]
fn seed_changes_results() {
    let mut cfg = small(Experiment::SinrVsSnr);
    let a = run_experiment(&cfg).unwrap();
    cfg.seed += 1;
    let b = run_experiment(&cfg).unwrap();
    assert_ne!(a.series, b.series);
}

#[test]
fn optimal_dominates_every_method() {
    let result = run_experiment(&small(Experiment::SinrVsSnr)).unwrap();
    assert_eq!(result.dominance_violations, 0);
    for series in &result.series {
        for (xi, p) in series.points.iter().enumerate() {
            for (v, opt) in p.raw.iter().zip(&result.optimal_db[xi]) {
                assert!(v.unwrap() <= opt + 1e-6);
            }
        }
    }
}

#[test]
fn empty_method_set_writes_header_only() {
    let mut cfg = small(Experiment::SinrVsSnr);
    cfg.methods.clear();
    let result = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&result, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), format!("{SUMMARY_HEADER}\n"));
    assert_eq!(fs::read_to_string(raw_path(&path)).unwrap(), format!("{RAW_HEADER}\n"));
}

#[test]
fn auto_dimension_is_recorded() {
    let mut cfg = small(Experiment::SinrVsSnr);
    cfg.l = LSetting::Auto;
    cfg.methods = vec![Method::Lcssp];
    let result = run_experiment(&cfg).unwrap();
    let trials: usize = result.diagnostics.l_histogram.values().sum();
    assert_eq!(trials, cfg.trials * cfg.x_values().len());
    assert_eq!(
        result.diagnostics.l_histogram.keys().copied().collect::<Vec<_>>(),
        vec![12]
    );
    assert!(result.diagnostics.epsilon_n.iter().all(|&e| e <= cfg.delta));
}

#[test]
fn estimated_interferers_run_cleanly() {
    let mut cfg = small(Experiment::SinrVsSnr);
    cfg.l = LSetting::Auto;
    cfg.estimate_interferers = true;
    cfg.methods = vec![Method::Optimal, Method::Lcssp];
    let result = run_experiment(&cfg).unwrap();
    assert!(result.all_ok(), "{:?}", result.failures);
}

#[test]
fn beampattern_outputs_curves() {
    let mut cfg = small(Experiment::Beampattern);
    cfg.beampattern_points = 361;
    let result = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_outputs(&result, dir.path()).unwrap();
    let curves = written.iter().find(|p| p.ends_with("beampattern_curves.csv")).unwrap();
    let text = fs::read_to_string(curves).unwrap();
    assert_eq!(text.lines().count(), 1 + 361 * cfg.methods.len());
    for (_, curve) in &result.beampatterns {
        let peak = curve.gains_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(peak.abs() < 1e-12);
    }
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("beampattern_diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["dominance_violations"], 0);
}

fn beamlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beamlab"))
}

#[test]
fn cli_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(
        &config,
        r#"{"experiment": "sinr_vs_inr", "trials": 3, "inr_grid_db": [0, 20]}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = beamlab()
            .args(["run", "--config"])
            .arg(&config)
            .args(["--seed", "5", "--methods", "optimal,lcssp", "--fix-l", "20", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(fs::read(out.join("sinr_vs_inr.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(String::from_utf8_lossy(&outputs[0]).lines().count(), 1 + 2 * 2);
}

#[test]
fn cli_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"m": 10, "bogus": 1}"#).unwrap();
    let status = beamlab()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
    let status = beamlab()
        .args(["run", "--methods", "nope", "--trials", "1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn cli_writes_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let status = beamlab()
        .args(["plot-script", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let script = fs::read_to_string(dir.path().join("plot_results.py")).unwrap();
    assert!(script.contains("matplotlib"));
}
