use std::process::Command;

use bsclust::io::{self, read_results_file, write_results_file, write_summary_file};
use bsclust::summary::percentile;
use bsclust::{run_experiment, summarize, ExperimentConfig, Preset, SweepVariable};
use bsclust_core::MethodId;

fn small_b() -> ExperimentConfig {
    let mut cfg = Preset::B.config();
    cfg.num_drops = 4;
    cfg.sweep.values = vec![0.0, 20.0, 40.0];
    cfg
}

#[test]
fn results_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let rows = run_experiment(&small_b(), false).unwrap().rows;
    write_results_file(&path, &rows).unwrap();
    assert_eq!(read_results_file(&path).unwrap(), rows);
}

#[test]
fn runs_are_byte_identical_and_seed_sensitive() {
    let bytes = |cfg: &ExperimentConfig| {
        let mut buf = Vec::new();
        io::write_results(&mut buf, &run_experiment(cfg, false).unwrap().rows).unwrap();
        buf
    };
    let mut cfg = small_b();
    let a = bytes(&cfg);
    assert_eq!(a, bytes(&cfg));
    cfg.master_seed += 1;
    assert_ne!(a, bytes(&cfg));
}

#[test]
fn summary_matches_direct_recomputation() {
    let rows = run_experiment(&small_b(), false).unwrap().rows;
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 3 * MethodId::ALL.len());
    for s in &summary {
        let mut xs: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == s.method && r.sweep_value == s.sweep_value)
            .map(|r| r.sum_throughput)
            .collect();
        let n = xs.len() as f64;
        assert_eq!(s.count, xs.len());
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!((s.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!((s.stderr - (var / n).sqrt()).abs() <= 1e-12 * mean.abs().max(1.0));
        xs.sort_by(f64::total_cmp);
        assert_eq!(s.p50, percentile(&xs, 0.5));
        assert!(s.p10 <= s.p50 && s.p50 <= s.p90);
        assert_eq!(s.sweep_variable, SweepVariable::TxPowerDbm);
    }
}

#[test]
fn summary_header_names_sweep_variable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.csv");
    let mut cfg = Preset::A.config();
    cfg.num_drops = 2;
    cfg.methods = vec![MethodId::Grand];
    write_summary_file(&path, &summarize(&run_experiment(&cfg, false).unwrap().rows)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(
        text.starts_with("method,speed_kmh,count,mean_sum_throughput,"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 1 + cfg.sweep.values.len());
}

#[test]
fn grand_wins_slow_singletons_win_fast() {
    let mut cfg = Preset::A.config();
    cfg.num_drops = 30;
    cfg.sweep.values = vec![3.0, 120.0];
    cfg.methods = vec![MethodId::Grand, MethodId::Singletons];
    let s = summarize(&run_experiment(&cfg, false).unwrap().rows);
    let mean = |m, x| {
        s.iter()
            .find(|r| r.method == m && r.sweep_value == x)
            .unwrap()
            .mean
    };
    assert!(mean(MethodId::Grand, 3.0) > mean(MethodId::Singletons, 3.0));
    assert!(mean(MethodId::Singletons, 120.0) > mean(MethodId::Grand, 120.0));
}

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bsclust"));
    cmd.env("RUST_BACKTRACE", "0").env("RUST_LIB_BACKTRACE", "0");
    cmd
}

#[test]
fn cli_simulate_and_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = cli()
        .args([
            "simulate",
            "--preset",
            "B",
            "--drops",
            "2",
            "--methods",
            "grand,singletons,formation",
        ])
        .arg("--out")
        .arg(&out)
        .arg("--traces")
        .status()
        .unwrap();
    assert!(status.success());
    for f in [
        io::RESULTS_FILE,
        io::SUMMARY_FILE,
        io::MANIFEST_FILE,
        io::TRACES_FILE,
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join(io::MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["num_rows"], 2 * 9 * 3);
    assert_eq!(manifest["config"]["num_drops"], 2);

    let again = dir.path().join("summary.csv");
    let status = cli()
        .arg("summarize")
        .arg("--in")
        .arg(out.join(io::RESULTS_FILE))
        .arg("--out")
        .arg(&again)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        std::fs::read(out.join(io::SUMMARY_FILE)).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn cli_config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    let output = cli().args(["preset", "C"]).output().unwrap();
    assert!(output.status.success());
    std::fs::write(&cfg_path, &output.stdout).unwrap();
    let loaded = ExperimentConfig::load(&cfg_path).unwrap();
    assert_eq!(loaded, Preset::C.config());

    let bell = cli().args(["bell", "--k", "8"]).output().unwrap();
    assert_eq!(String::from_utf8(bell.stdout).unwrap().trim(), "4140");

    assert!(!cli()
        .args(["simulate", "--preset", "B"])
        .output()
        .unwrap()
        .status
        .success());
    assert!(!cli()
        .args(["bell", "--k", "26"])
        .output()
        .unwrap()
        .status
        .success());
    std::fs::write(&cfg_path, "num_drops = 0\n").unwrap();
    let bad = cli()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
