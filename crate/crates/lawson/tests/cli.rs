use std::path::Path;
use std::process::{Command, Output};

fn lawson(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lawson")).args(args).current_dir(dir).output().expect("run lawson")
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("error line");
    serde_json::from_str(line).expect("error JSON on stderr")
}

#[test]
fn solve_then_mesh_patch() {
    let dir = tempfile::tempdir().unwrap();
    let o = lawson(&["solve", "--k", "3", "--phi", "1.454838491", "--samples", "64", "--out", "k3.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sol: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("k3.json")).unwrap()).unwrap();
    for key in ["k", "t", "phi", "order_n", "r", "x1", "x2", "x3", "residual_norm", "iterations", "delta_at_i"] {
        assert!(sol.get(key).is_some(), "missing {key}");
    }
    for key in ["area", "volume", "K_imag", "lattice", "shortest", "area_normalized", "volume_normalized"] {
        assert!(sol.get(key).is_some(), "missing {key}");
    }
    assert_eq!(sol["x1"].as_array().unwrap().len(), 22);
    assert!((sol["area_normalized"].as_f64().unwrap() - 1.731745356).abs() < 1e-5);

    let o = lawson(&["mesh", "--solution", "k3.json", "--patch-only", "--out", "patch.obj"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let residuals = report["plane_residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 4);
    assert!(residuals.iter().all(|r| r.as_f64().unwrap() < 1e-8));
    assert!(report["A_tri"].is_null());
    let obj = std::fs::read_to_string(dir.path().join("patch.obj")).unwrap();
    assert!(obj.starts_with("# lawson"));
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2236);
    assert!(dir.path().join("patch.geometry.json").exists());
}

#[test]
fn divergence_exits_two_with_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = lawson(&["solve", "--k", "3", "--phi", "1.57", "--samples", "64"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "diverged");
    assert!(!e["residual_history"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lawson(&["solve", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(lawson(&["solve", "--tol", "0"], dir.path()).status.code(), Some(1));
    let o = lawson(&["mesh", "--solution", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "io");
    assert_eq!(lawson(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn competitor_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = lawson(&["profile", "--lattice", "hex", "--competitors-only", "--steps", "20"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let v0 = 3.0 / (4.0 * std::f64::consts::PI);
    let row = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| (f[0].parse::<f64>().unwrap() - v0).abs() < 1e-15)
        .expect("transition volume row");
    assert!((row[1].parse::<f64>().unwrap() - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn validate_single_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = lawson(&["validate", "--check", "cylinder-K"], dir.path());
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("PASS cylinder-K"));
    assert_eq!(lawson(&["validate", "--check", "nonsense"], dir.path()).status.code(), Some(1));
}
