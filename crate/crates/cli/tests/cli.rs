use std::path::Path;
use std::process::{Command, Output};

fn spinbus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbus")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn pst_run_writes_outputs_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "pst", "parameters": {"n": 6}}"#);
    let out = tmp.path().join("run");
    let o = spinbus(&["pst", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.join("fidelity.csv")).unwrap();
    let mut rows = csv.lines().skip(1).map(|l| {
        let (t, f) = l.split_once(',').unwrap();
        (t.parse::<f64>().unwrap(), f.parse::<f64>().unwrap())
    });
    let peak = rows.clone().fold((0.0, 0.0), |a, r| if r.1 > a.1 { r } else { a });
    assert!((peak.1 - 1.0).abs() < 1e-8);
    assert!((peak.0 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!(rows.all(|(_, f)| f <= 1.0 + 1e-12));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["parameters"]["n"], 6);
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let body = std::fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), spinbus_cli::output::sha256_hex(&body));
    }
}

#[test]
fn malformed_config_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", r#"{"experiment": "pst", "parameters": {"n": 6"#);
    let out = tmp.path().join("run");
    let o = spinbus(&["pst", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_parameter_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "pst", "parameters": {"n": 6, "m": 1}}"#);
    let o = spinbus(&["pst", "--config", &cfg, "--output", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(tmp.path(), "d.json", r#"{"experiment": "pst", "parameters": {"n": 6}, "colour": 1}"#);
    let o = spinbus(&["pst", "--config", &cfg, "--output", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "pst", "parameters": {"n": 6}}"#);
    let o = spinbus(&["memory", "--config", &cfg, "--output", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_ladder_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "ladder", "parameters": {"distances": [30], "j": 1.0, "j0": 0.1, "connection": "type_a"}}"#,
    );
    let out = tmp.path().join("run");
    let o = spinbus(&["ladder", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn non_empty_output_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "pst", "parameters": {"n": 4}}"#);
    let out = tmp.path().join("run");
    std::fs::create_dir(&out).unwrap();
    std::fs::write(out.join("keep.txt"), "x").unwrap();
    let o = spinbus(&["pst", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 1);
}

#[test]
fn timestamped_directory_under_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path().join("results");
    let body = format!(
        r#"{{"experiment": "pst", "parameters": {{"n": 4}}, "output_dir": {}}}"#,
        serde_json::to_string(&base).unwrap()
    );
    let cfg = write_config(tmp.path(), "c.json", &body);
    for _ in 0..2 {
        let o = spinbus(&["pst", "--config", &cfg, "--threads", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let dirs: Vec<String> = std::fs::read_dir(&base)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(dirs.len(), 2);
    assert!(dirs.iter().all(|d| d.starts_with("pst_")));
}

#[test]
fn list_variants() {
    let o = spinbus(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["pst:", "wavepacket:", "ladder:", "memory:"] {
        assert!(text.contains(name));
    }

    let o = spinbus(&["list", "--json"]);
    let schemas: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(schemas.as_array().unwrap().len(), 4);
    assert!(schemas.as_array().unwrap().iter().all(|s| s["additionalProperties"] == false));

    let o = spinbus(&["list", "ladder", "--json"]);
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["title"], "ladder");

    assert_eq!(spinbus(&["list", "teleport"]).status.code(), Some(2));
}

#[test]
fn memory_out_of_regime_has_no_analytic_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "memory", "parameters": {"n": 8, "j": 1.0, "lambda": 0.1, "sigma": 1.0, "broadening": 1e-9, "samples": 11}}"#,
    );
    let out = tmp.path().join("run");
    let o = spinbus(&["memory", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("memory.json")).unwrap()).unwrap();
    let ratio = report["gamma_over_g"].as_f64().unwrap();
    assert_eq!(out.join("analytic.csv").exists(), ratio < 1.0);
    assert!(report["ring_validation"].is_object());
}
