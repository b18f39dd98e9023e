//! End-to-end runs of every experiment with small trial counts.

use std::path::Path;
use std::process::Command;

use cvqec_cli::{run_experiment, Experiment, ExperimentConfig, SweepParameter, SweepSpec};
use serde_json::Value;

fn config(exp: Experiment, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(exp);
    cfg.out = out.to_path_buf();
    cfg.trials = 8;
    cfg.window = 64;
    cfg
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn variance(a: &[f64]) -> f64 {
    let n = a.len() as f64;
    let m = a.iter().sum::<f64>() / n;
    a.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn syndrome_traces_show_the_channel_signatures() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::SyndromeDemo, dir.path());
    cfg.trials = 400;
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.files.len(), 6);

    let ch1 = dir.path().join("syndrome_ch1.csv");
    let header: Vec<String> =
        csv::Reader::from_path(&ch1).unwrap().headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["sample", "x_D1", "p_D2", "x_D3", "x_D4"]);

    let d1 = column(&ch1, "x_D1");
    assert_eq!(d1.len(), 400);
    assert!(correlation(&d1, &column(&ch1, "x_D3")) > 0.9);
    assert!(variance(&column(&ch1, "x_D4")) < 2.0 * 0.25);

    let ch2 = dir.path().join("syndrome_ch2.csv");
    assert!(correlation(&column(&ch2, "x_D1"), &column(&ch2, "x_D3")) < -0.9);

    let report = json(&dir.path().join("syndrome_summary.json"));
    let traces = report["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 6);
    assert!(traces.iter().all(|t| t["matched"] == true));
    assert_eq!(traces[5]["classification"], "no-error");
}

#[test]
fn fourier_mode_swaps_the_detector_quadratures() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::SyndromeDemo, dir.path());
    cfg.trials = 64;
    cfg.code.fourier_mode = true;
    run_experiment(&cfg).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("syndrome_ch3.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["sample", "p_D1", "x_D2", "p_D3", "p_D4"]);
}

#[test]
fn fidelity_rises_with_squeezing_and_falls_with_loss() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Experiment::McSweep, dir.path());
    cfg.sweep = Some(SweepSpec { parameter: SweepParameter::R, values: vec![0.0, 0.3, 0.8, 1.5] });
    run_experiment(&cfg).unwrap();
    let theory = column(&dir.path().join("mc_sweep.csv"), "theory_fidelity");
    assert!(theory.windows(2).all(|w| w[1] > w[0]), "{theory:?}");

    cfg.code = cvqec_core::CodeConfig::with_squeezing_db(-3.5);
    cfg.sweep = Some(SweepSpec { parameter: SweepParameter::Eta, values: vec![1.0, 0.9, 0.7, 0.5] });
    run_experiment(&cfg).unwrap();
    let theory = column(&dir.path().join("mc_sweep.csv"), "theory_fidelity");
    assert!(theory.windows(2).all(|w| w[1] <= w[0]), "{theory:?}");
}

#[test]
fn theory_columns_ignore_seed_and_trials() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = config(Experiment::Table2, a.path());
    cfg.seed = 1;
    run_experiment(&cfg).unwrap();
    cfg.out = b.path().to_path_buf();
    cfg.seed = 2;
    cfg.trials = 5;
    run_experiment(&cfg).unwrap();
    let theory = |d: &Path| column(&d.join("table2.csv"), "theory_fidelity");
    assert_eq!(theory(a.path()), theory(b.path()));
    assert_eq!(theory(a.path()).len(), 20);
    assert_ne!(column(&a.path().join("table2.csv"), "mc_fidelity"), column(&b.path().join("table2.csv"), "mc_fidelity"));
}

#[test]
fn remaining_experiments_write_their_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (exp, stem, rows) in [
        (Experiment::TableC1, "tableC1", 40),
        (Experiment::Spectra, "spectra", 12),
        (Experiment::Witness, "witness", 6),
    ] {
        run_experiment(&config(exp, dir.path())).unwrap();
        let report = json(&dir.path().join(format!("{stem}.json")));
        assert_eq!(report["experiment"], exp.name());
        assert_eq!(report["rows"].as_array().unwrap().len(), rows, "{stem}");
        assert_eq!(column(&dir.path().join(format!("{stem}.csv")), columns(exp)).len(), rows);
    }
}

fn columns(exp: Experiment) -> &'static str {
    match exp {
        Experiment::TableC1 => "theory_db",
        Experiment::Spectra => "corrected_theory_db",
        _ => "value_1",
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let base = r#"{"experiment": "mc-sweep""#;
    for extra in [
        r#", "trials": 0"#,
        r#", "window": 10"#,
        r#", "colour": "red""#,
        r#", "sweep": {"parameter": "r", "values": [0.5]}"#,
        r#", "sweep": {"parameter": "eta", "values": [1.0, 1.5]}"#,
        r#", "sweep": {"parameter": "gamma", "values": [0.5, -0.1]}"#,
    ] {
        assert!(ExperimentConfig::from_json(&format!("{base}{extra}}}")).is_err(), "{extra}");
    }
    assert!(ExperimentConfig::from_json(&format!("{base}}}")).is_ok());
    assert!(ExperimentConfig::from_json(r#"{"experiment": "syndrome-demo", "trials": 100}"#).is_err());
}

#[test]
fn binary_applies_flag_overrides_and_checks_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("witness.json");
    std::fs::write(&cfg_path, r#"{"experiment": "witness", "seed": 3, "trials": 5}"#).unwrap();
    let out = dir.path().join("out");
    let run = Command::new(env!("CARGO_BIN_EXE_cvqec"))
        .args(["run", "witness", "--trials", "7", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let report = json(&out.join("witness.json"));
    assert_eq!(report["config"]["trials"], 7);
    assert_eq!(report["config"]["seed"], 3);

    let mismatch = Command::new(env!("CARGO_BIN_EXE_cvqec"))
        .args(["run", "table2", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(!mismatch.status.success());
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("witness"));
}

#[test]
fn thread_count_does_not_change_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(sub);
        let child = Command::new(env!("CARGO_BIN_EXE_cvqec"))
            .args(["run", "mc-sweep", "--trials", "6", "--window", "40", "--seed", "9", "--out"])
            .arg(&out)
            .env("CVQEC_THREADS", threads)
            .output()
            .unwrap();
        assert!(child.status.success());
        std::fs::read(out.join("mc_sweep.csv")).unwrap()
    };
    assert_eq!(run("1", "one"), run("3", "three"));

    let bad = Command::new(env!("CARGO_BIN_EXE_cvqec"))
        .args(["run", "witness", "--out"])
        .arg(dir.path().join("bad"))
        .env("CVQEC_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
