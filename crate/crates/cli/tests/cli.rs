use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> Vec<u8> {
    std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn subord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subord")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = subord(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

struct Tmp(TempDir);

impl Tmp {
    fn new() -> Self {
        Tmp(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }
}

#[test]
fn golden_cf() {
    let t = Tmp::new();
    let m = fixture("vg.json");
    run_ok(&["cf", "--model", m.to_str().unwrap(), "--out", &t.arg("cf.csv"), "--theta-min", "-5", "--theta-max", "5", "--theta-steps", "20"]);
    assert_eq!(std::fs::read(t.path("cf.csv")).unwrap(), golden("cf_vg.csv"));
}

#[test]
fn golden_subordinate() {
    let t = Tmp::new();
    let m = fixture("poisson_atom.json");
    run_ok(&["subordinate", "--model", m.to_str().unwrap(), "--out", &t.arg("s.json")]);
    assert_eq!(std::fs::read(t.path("s.json")).unwrap(), golden("subordinate_poisson_atom.json"));
}

#[test]
fn golden_simulate() {
    let t = Tmp::new();
    let m = fixture("vg.json");
    run_ok(&["simulate", "--model", m.to_str().unwrap(), "--out", &t.arg("p.csv"), "--seed", "42", "--dt", "0.1", "--horizon", "1"]);
    assert_eq!(std::fs::read(t.path("p.csv")).unwrap(), golden("simulate_vg.csv"));
}

#[test]
fn same_seed_same_bytes() {
    let t = Tmp::new();
    let m = fixture("vg.json");
    for name in ["a.csv", "b.csv"] {
        run_ok(&["simulate", "--model", m.to_str().unwrap(), "--out", &t.arg(name), "--seed", "5", "--dt", "0.01", "--n-paths", "3"]);
    }
    for k in 0..3 {
        let a = std::fs::read(t.path(&format!("a-{k}.csv"))).unwrap();
        let b = std::fs::read(t.path(&format!("b-{k}.csv"))).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn cf_is_zero_at_the_origin() {
    let t = Tmp::new();
    let m = fixture("vg.json");
    run_ok(&["cf", "--model", m.to_str().unwrap(), "--out", &t.arg("cf.csv"), "--theta", "-1,0,2"]);
    let r = rows(&t.path("cf.csv"));
    assert_eq!(r[1], vec![0.0, 0.0, 0.0]);
}

#[test]
fn exit_codes() {
    let t = Tmp::new();
    let bad = t.path("bad.json");
    std::fs::write(&bad, r#"{"schema":1,"levy":{"type":"gaussian","mean":0,"variance":1},"subordinator":{"beta0":-1}}"#).unwrap();
    let out = subord(&["cf", "--model", bad.to_str().unwrap(), "--out", &t.arg("x.csv")]);
    assert_eq!(out.status.code(), Some(2));

    let out = subord(&["cf", "--model", &t.arg("missing.json"), "--out", &t.arg("x.csv")]);
    assert_eq!(out.status.code(), Some(4));

    // a point mass at 5 wraps the phase by more than π between grid points
    let delta = t.path("delta.json");
    std::fs::write(&delta, r#"{"schema":1,"levy":{"type":"delta","position":5},"subordinator":{"beta0":1}}"#).unwrap();
    let pi2 = format!("{}", 2.0 * std::f64::consts::PI);
    let out = subord(&[
        "recover", "--model", delta.to_str().unwrap(), "--out", &t.arg("r.json"), "--family", "drift",
        "--n-obs", "1000", "--theta-min", &format!("-{pi2}"), "--theta-max", &pi2, "--theta-steps", "20",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("branch"));
}

#[test]
fn drift_is_recovered_exactly() {
    let t = Tmp::new();
    let m = fixture("drift.json");
    run_ok(&["recover", "--model", m.to_str().unwrap(), "--out", &t.arg("r.json"), "--family", "drift", "--n-obs", "1000", "--with-drift"]);
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(t.path("r.json")).unwrap()).unwrap();
    assert_eq!(r["beta0"].as_f64().unwrap(), 2.0);
}

#[test]
fn drift_paths_are_linear() {
    let t = Tmp::new();
    let m = fixture("drift.json");
    run_ok(&["simulate", "--model", m.to_str().unwrap(), "--out", &t.arg("x.csv"), "--dt", "0.25", "--horizon", "2"]);
    for r in rows(&t.path("x.csv")) {
        assert!((r[1] - 2.0 * r[0]).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn basis_unions_are_sums() {
    let t = Tmp::new();
    let m = fixture("basis.json");
    run_ok(&["basis-sim", "--model", m.to_str().unwrap(), "--out", &t.arg("b.csv"), "--seed", "3"]);
    let r = rows(&t.path("b.csv"));
    assert_eq!(r.len(), 6);
    let v: Vec<f64> = r.iter().map(|row| row[4]).collect();
    assert_eq!(v[4], v[0] + v[1]);
    assert_eq!(v[5], v[0] + v[1] + v[2] + v[3]);
}

#[test]
fn lss_writes_path_and_driver() {
    let t = Tmp::new();
    let m = fixture("ou.json");
    run_ok(&[
        "lss-sim", "--model", m.to_str().unwrap(), "--out", &t.arg("y.csv"), "--driver-out", &t.arg("d.csv"),
        "--dt", "0.01", "--horizon", "1", "--seed", "1",
    ]);
    assert_eq!(rows(&t.path("y.csv")).len(), rows(&t.path("d.csv")).len() + 1);
}
