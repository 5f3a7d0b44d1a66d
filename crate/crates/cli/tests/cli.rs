use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn drivenjc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drivenjc"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_body(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

fn metadata(path: &Path, key: &str) -> Option<String> {
    let prefix = format!("# {key} = ");
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_owned))
}

fn field(body: &str, row: &str, col: usize) -> f64 {
    body.lines()
        .find(|l| l.split(',').next() == Some(row))
        .and_then(|l| l.split(',').nth(col))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {row}"))
}

#[test]
fn effparams_reports_enhanced_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let out = drivenjc(dir.path(), &["effparams", "--omega-over-g", "80", "--dsigma", "optimal"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv_body(&dir.path().join("effparams.csv"));
    let analytic = field(&body, "g_eff", 1);
    let engine = field(&body, "g_eff", 2);
    assert!((analytic - 8.0 / 405.0).abs() < 1e-12);
    assert!((engine - analytic).abs() < 1e-12);
    assert!((field(&body, "ratio_to_resonant_drive", 1) - 32.0 / 27.0).abs() < 1e-9);

    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("effparams.json")).unwrap()).unwrap();
    assert_eq!(sidecar["config"]["process"], "I");
    assert_eq!(sidecar["config"]["omega_over_g"], 80.0);
    assert_eq!(
        sidecar["config_hash"].as_str(),
        metadata(&dir.path().join("effparams.csv"), "config_hash").as_deref()
    );
}

#[test]
fn csv_bodies_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--process", "II", "--omega-over-g", "40", "--dsigma", "optimal", "crossing"];
    assert!(drivenjc(a.path(), &args).status.success());
    assert!(drivenjc(b.path(), &args).status.success());
    assert_eq!(csv_body(&a.path().join("crossing.csv")), csv_body(&b.path().join("crossing.csv")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# run\nprocess = III\nomega-over-g = 30\ndsigma = optimal\n").unwrap();
    let out = drivenjc(dir.path(), &["--config", cfg.to_str().unwrap(), "--omega-over-g", "20", "effparams"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("effparams.csv");
    assert_eq!(metadata(&csv, "process").as_deref(), Some("III"));
    assert_eq!(metadata(&csv, "omega_over_g").as_deref(), Some("20"));
}

#[test]
fn crossing_for_two_qubit_process() {
    let dir = tempfile::tempdir().unwrap();
    let out = drivenjc(dir.path(), &["--process", "III", "--omega-over-g", "20", "crossing"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("crossing.json")).unwrap()).unwrap();
    let text = sidecar.to_string();
    assert!(text.contains("half_splitting"), "{text}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rel: f64 = stdout
        .split("relative difference ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .expect("relative difference printed");
    assert!(rel < 0.03, "{stdout}");
}

#[test]
fn table_uses_bundled_platforms() {
    let dir = tempfile::tempdir().unwrap();
    let out = drivenjc(dir.path(), &["table"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv_body(&dir.path().join("table.csv"));
    assert_eq!(body.lines().count(), 6);
}

#[test]
fn table_reads_platform_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.csv");
    fs::write(&file, "name,g_over_2pi,gamma_over_2pi\nlab,1e6,1e3\n").unwrap();
    let out = drivenjc(dir.path(), &["table", "--platforms", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv_body(&dir.path().join("table.csv")).contains("lab"));
}

#[test]
fn protocol_reads_out_excited_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = drivenjc(dir.path(), &["--omega-over-g", "80", "protocol", "--samples", "21"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("protocol.json")).unwrap()).unwrap();
    let pe = sidecar["summary"]["excited_population"].as_f64().unwrap();
    let pm = sidecar["summary"]["minus_population"].as_f64().unwrap();
    assert!(pe > 0.98);
    assert!((pe - pm).abs() < 1e-8);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--f", "2", "effparams"][..],
        &["--process", "IV", "effparams"],
        &["--omega-over-g", "-1", "crossing"],
        &["spectrum", "--points", "1"],
        &["nonsense"],
    ] {
        let out = drivenjc(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "omega = 3\n").unwrap();
    let out = drivenjc(dir.path(), &["--config", cfg.to_str().unwrap(), "effparams"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn crossing_search_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = drivenjc(
        dir.path(),
        &["--process", "II", "--omega-over-g", "3", "--dsigma", "0", "crossing", "--width", "0.5"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_files_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.cfg");
    let out = drivenjc(dir.path(), &["--config", missing.to_str().unwrap(), "effparams"]);
    assert_eq!(out.status.code(), Some(4));
    let out = drivenjc(dir.path(), &["table", "--platforms", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}
