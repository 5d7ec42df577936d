use std::path::PathBuf;
use std::process::Command;

use elastic_cli::{CliError, Mode, RunConfig};

fn scratch(name: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&p);
    std::fs::create_dir_all(&p).unwrap();
    p
}

fn field_path(text: &str) -> String {
    match RunConfig::from_json(text) {
        Err(CliError::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn empty_config_is_the_default() {
    assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    let text = serde_json::to_string(&RunConfig::default()).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), RunConfig::default());
}

#[test]
fn malformed_fields_report_their_path() {
    assert_eq!(field_path(r#"{"solver": {"cells_per_eta": "x"}}"#), "solver.cells_per_eta");
    assert_eq!(field_path(r#"{"data": {"etaa": 0.1}}"#), "data.etaa");
    assert_eq!(field_path(r#"{"mode": "simulat"}"#), "mode");
    assert_eq!(field_path(r#"{"compare": {"levels": [100, "a"]}}"#), "compare.levels[1]");
}

#[test]
fn mode_validation_names_the_field() {
    let mut cfg = RunConfig::default();
    cfg.compare.levels = vec![200.0, 100.0];
    let err = cfg.validate(Mode::CompareOracle).unwrap_err();
    assert!(matches!(&err, CliError::Config { path, .. } if path == "compare.levels"), "{err}");
    assert_eq!(err.exit_code(), 2);

    let mut cfg = RunConfig::default();
    cfg.single_wave.a1 = 0.7;
    assert!(cfg.validate(Mode::SingleWave).is_err());
    assert!(RunConfig::default().validate(Mode::SingleWave).is_ok());
}

#[test]
fn wrong_sign_material_is_rejected() {
    let text = r#"{"material": {"direct": {"c1": 2, "c2": 1, "sigma0": 1, "sigma1": 1, "delta": 0.01}}}"#;
    let cfg = RunConfig::from_json(text).unwrap();
    let err = cfg.validate(Mode::VerifyStructure).unwrap_err();
    assert!(matches!(&err, CliError::Config { path, .. } if path == "material"), "{err}");
}

#[test]
fn mode_names_round_trip() {
    for m in [Mode::VerifyStructure, Mode::Simulate, Mode::CompareOracle, Mode::SweepEta, Mode::SingleWave] {
        assert_eq!(Mode::parse(m.name()), Some(m));
    }
    assert_eq!(Mode::parse("bogus"), None);
}

fn elastic(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_elastic")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = scratch("exit");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"data": {"theta": "big"}}"#).unwrap();
    let o = elastic(&["--config", bad.to_str().unwrap(), "--mode", "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("data.theta"));

    assert_eq!(elastic(&["--mode", "nope"]).status.code(), Some(2));
    assert_eq!(elastic(&[]).status.code(), Some(2));

    let out = dir.join("sw");
    let o = elastic(&["--mode", "single-wave", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["mode"], "single-wave");
    assert_eq!(report["all_passed"], true);
    assert!(out.join("riccati.csv").exists() && out.join("summary.txt").exists());
}
