use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn irrmot(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irrmot")).args(args).env("IRRMOT_CACHE_DIR", cache).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const RANK_ONE: &str = r#"{"g":1,"divisor":{"0":{"n":2,"n_fixed":2}},"gamma":{"r":1,"parts":[[0,1,1]]},"d":0,"eps":"1","zeta":[{"x":0,"j":1,"value":["1","0"]}],"kind":"full"}"#;

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(irrmot(dir.path(), &["kernels", "--divisor", "p:-1"]).status.code(), Some(1));
    assert_eq!(irrmot(dir.path(), &["omega", "--bogus"]).status.code(), Some(1));
    assert_eq!(irrmot(dir.path(), &["conn-class", "--query", "{"]).status.code(), Some(1));
    assert_eq!(irrmot(dir.path(), &["omega", "--format", "csv"]).status.code(), Some(1));
    assert_eq!(irrmot(dir.path(), &["kernels", "--zmax", "4", "--window", "5"]).status.code(), Some(1));
    assert_eq!(irrmot(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn kernel_identity_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = irrmot(dir.path(), &["check-mellit", "--genus", "1", "--divisor", "0:2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["all_equal"], true);
    // a truncation too short for the tail to vanish is inconclusive
    let short = irrmot(dir.path(), &["kernels", "--genus", "1", "--rmax", "2", "--zmax", "3", "--window", "1"]);
    assert_eq!(short.status.code(), Some(3), "{}", stderr(&short));
}

#[test]
fn cache_hit_miss_and_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["kernels", "--genus", "1", "--delta", "1", "--points", "0"];
    let first = irrmot(dir.path(), &args);
    assert!(stderr(&first).contains("cache miss"));
    let second = irrmot(dir.path(), &args);
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    fs::write(&entries[0], b"{ not json").unwrap();
    let third = irrmot(dir.path(), &args);
    assert_eq!(third.status.code(), Some(0));
    assert!(stderr(&third).contains("corrupt cache entry"));
    assert_eq!(third.stdout, first.stdout);
    assert!(stderr(&irrmot(dir.path(), &args)).contains("cache hit"));
}

#[test]
fn query_commands() {
    let dir = tempfile::tempdir().unwrap();
    let qpath = dir.path().join("q.json");
    fs::write(&qpath, RANK_ONE).unwrap();
    let at = format!("@{}", qpath.display());
    let cache = dir.path().join("cache");
    let conn = irrmot(&cache, &["conn-class", "--query", &at]);
    assert_eq!(conn.status.code(), Some(0), "{}", stderr(&conn));
    let conn: serde_json::Value = serde_json::from_slice(&conn.stdout).unwrap();
    let graded = irrmot(&cache, &["graded-class", "--query", &at]);
    let graded: serde_json::Value = serde_json::from_slice(&graded.stdout).unwrap();
    assert_eq!(conn["value"], graded["value"]);
    let p = irrmot(&cache, &["poincare", "--query", RANK_ONE]);
    assert_eq!(p.status.code(), Some(0));
    let p: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert_eq!(p["routes_agree"], true);
    assert_eq!(p["value"]["num"], "t^3 - t^2");
    let e = irrmot(&cache, &["epoly", "--query", RANK_ONE]);
    assert_eq!(e.status.code(), Some(0));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ddp.csv");
    let o = irrmot(dir.path(), &["ddp", "--case", "1,2,1", "--format", "csv", "--out", out.to_str().unwrap()]);
    // rank-one polynomials are not self-palindromic
    assert_eq!(o.status.code(), Some(2));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("r,n,g,"));
    assert!(text.contains("t^4 - 2*t^3 + t^2"));
}
