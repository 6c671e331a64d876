use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

const DEVICE: &str = r#"{"C": 40e-15, "L": 100e-12, "I_c": 3.95e-6, "Phi_x": -0.501,
    "grid": {"x_min": -1.05, "x_max": 0.05, "n_points": 1201}}"#;

fn base() -> Value {
    json!({
        "device": serde_json::from_str::<Value>(DEVICE).unwrap(),
        "drive": {"omega_I": 1e9, "omega_II": 1e9, "delta": 1e11},
        "gate": "not",
        "geometric": {"kind": "rotation", "alpha": 0.6},
        "model": "closed_form"
    })
}

fn write_config(dir: &Path, name: &str, config: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squidgate"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn matrix(v: &Value) -> Vec<[f64; 2]> {
    v.as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter())
        .map(|c| [c[0].as_f64().unwrap(), c[1].as_f64().unwrap()])
        .collect()
}

#[test]
fn spectrum_report_has_device_and_flux_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base());
    let out = dir.path().join("out");
    let o = run(&["spectrum"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(out.join("spectrum.json"));
    assert!((report["beta_l"].as_f64().unwrap() - 1.2).abs() < 1e-3);
    let table = report["phi_table"].as_array().unwrap();
    assert_eq!(table.len(), 3);
    assert!(table.iter().all(|r| r["value"].as_f64().unwrap() > 0.0));
    let csv = fs::read_to_string(out.join("wavefunctions.csv")).unwrap();
    assert!(csv.starts_with("x,U,psi_0,psi_1,psi_a\n"));
}

#[test]
fn identical_runs_give_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for cmd in ["spectrum", "gate", "geometric", "dynamics"] {
        assert_eq!(run(&[cmd, "--seed", "7"], &cfg, &a).status.code(), Some(0), "{cmd}");
        assert_eq!(run(&[cmd, "--seed", "7"], &cfg, &b).status.code(), Some(0), "{cmd}");
    }
    for file in ["spectrum.json", "gate.json", "sequence.json", "geometric.json", "dynamics.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn emitted_sequence_reproduces_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["gate"] = json!({"phase": 0.9});
    let cfg = write_config(dir.path(), "c.json", &config);
    let first = dir.path().join("first");
    assert_eq!(run(&["gate"], &cfg, &first).status.code(), Some(0));

    let mut replay = base();
    replay["gate"] = json!({"sequence_file": first.join("sequence.json")});
    let cfg = write_config(dir.path(), "replay.json", &replay);
    let second = dir.path().join("second");
    let o = run(&["gate"], &cfg, &second);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let a = matrix(&read_json(first.join("gate.json"))["achieved"]);
    let b = matrix(&read_json(second.join("gate.json"))["achieved"]);
    for (x, y) in a.iter().zip(&b) {
        assert!((x[0] - y[0]).abs() <= 1e-12 && (x[1] - y[1]).abs() <= 1e-12, "{x:?} vs {y:?}");
    }
}

#[test]
fn hadamard_closed_form_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["gate"] = json!("hadamard");
    let cfg = write_config(dir.path(), "c.json", &config);
    let out = dir.path().join("out");
    assert_eq!(run(&["gate"], &cfg, &out).status.code(), Some(0));
    let fidelity = read_json(out.join("gate.json"))["fidelity"].as_f64().unwrap();
    assert!((fidelity - 1.0).abs() <= 1e-12, "{fidelity}");
}

#[test]
fn non_positive_inductance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["device"]["L"] = json!(0.0);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = run(&["spectrum"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn small_detuning_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["drive"]["delta"] = json!(1e9);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = run(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL") && l.contains("large detuning")), "{stdout}");
}

#[test]
fn missing_drive_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config.as_object_mut().unwrap().remove("drive");
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = run(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("drive"));
}

#[test]
fn unknown_keys_and_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["device"]["Lj"] = json!(1.0);
    let cfg = write_config(dir.path(), "c.json", &config);
    assert_eq!(run(&["spectrum"], &cfg, &dir.path().join("out")).status.code(), Some(2));
    let cfg = write_config(dir.path(), "ok.json", &base());
    assert_eq!(run(&["gate", "--model", "four_level"], &cfg, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn non_unitary_target_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base();
    config["gate"] = json!({"matrix": [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]});
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = run(&["gate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unitary"));
}

#[test]
fn table_format_follows_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &base());
    let out = dir.path().join("out");
    assert_eq!(run(&["dynamics", "--format", "json"], &cfg, &out).status.code(), Some(0));
    let table = read_json(out.join("timeseries.json"));
    assert_eq!(table["columns"], json!(["t", "p0", "p1", "pa", "sx", "sy", "sz"]));
    let last = table["rows"].as_array().unwrap().last().unwrap();
    assert!(last[2].as_f64().unwrap() > 1.0 - 1e-9, "NOT should end in |1>");
}
