use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spi(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spi"))
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .env_remove("SPI_CACHE_DIR")
        .output()
        .expect("spawn spi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.code().is_some(), "killed");
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn build_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["build", "--p", "2", "--e", "1", "--nu", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("vertices 65\n"));
    let o = spi(dir.path(), &["build", "--p", "3", "--e", "1", "--nu", "1"]);
    let out = stdout(&o);
    assert!(out.contains("vertices 4\n") && out.contains("edges 0\n") && out.contains("loops 4\n"), "{out}");
    let o = spi(dir.path(), &["build", "--p", "2", "--e", "1", "--nu", "3", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["vertices"], 2823);
    assert_eq!(v["provenance"], "built");
    let v = json(&spi(dir.path(), &["build", "--p", "2", "--e", "1", "--nu", "3", "--format", "json"]));
    assert_eq!(v["provenance"], "cached");
}

#[test]
fn invalid_params_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["build", "--p", "4", "--e", "1", "--nu", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spi(dir.path(), &["build", "--p", "2", "--e", "1", "--nu", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_overrides_cache_dir() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spi"))
        .args(["build", "--p", "2", "--nu", "1", "--cache-dir"])
        .arg(flag.path())
        .env("SPI_CACHE_DIR", env.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env.path().join("spi-p2-e1-nu1-v1.json").exists());
    assert!(!flag.path().join("spi-p2-e1-nu1-v1.json").exists());
}

#[test]
fn analyze_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["analyze", "--p", "2", "--e", "1", "--nu", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["diameter"], 4);
    assert_eq!(v["components"], 1);
    assert_eq!(v["witness_path"].as_array().unwrap().len(), 5);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let v = json(&spi(dir.path(), &["analyze", "--p", "2", "--e", "2", "--nu", "1"]));
    assert_eq!(v["diameter"], Value::Null);
    let conn = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "connected-iff-nu-ge-2").unwrap();
    assert_eq!(conn["status"], "pass");

    let v = json(&spi(dir.path(), &["analyze", "--p", "3", "--e", "1", "--nu", "2"]));
    let census = v["census"].as_array().unwrap();
    assert!(census.iter().any(|c| c["m"] == 1 && c["s"] == 0 && c["count"] == 40));
}

#[test]
fn orbit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["orbits", "--p", "2", "--nu", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["vertex"]["classes"].as_array().unwrap().len(), 4);
    assert_eq!(v["vertex"]["matches_invariant"], true);

    let o = spi(dir.path(), &["orbits", "--p", "2", "--nu", "2", "--edges", "--words"]);
    assert!(o.status.success());
    let v = json(&o);
    let classes = v["edge"]["classes"].as_array().unwrap();
    assert!(classes.iter().all(|c| c["invariant"].as_str().unwrap().starts_with("((")));
    assert!(classes.iter().all(|c| c["witness"]["word"].is_array()));

    let o = spi(dir.path(), &["orbits", "--p", "3", "--nu", "2", "--edges"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["edge"]["matches_invariant"], true);
}

#[test]
fn aut_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["aut", "--p", "2", "--e", "2", "--nu", "1"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["order"], 120);

    // the formula comparison is informational, so a mismatch keeps exit code 0
    let o = spi(dir.path(), &["aut", "--p", "2", "--nu", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["order"], 720);
    assert_eq!(v["comparisons"]["formula_value"], 360);
    assert_eq!(v["comparisons"]["match_flags"]["formula_equals_aut"], false);
    let formula = v["comparisons"]["checks"].as_array().unwrap().iter().find(|c| c["name"] == "order-formula").unwrap();
    assert_eq!(formula["status"], "reported-only");

    // a failing theorem flag gives exit code 1
    let o = spi(dir.path(), &["aut", "--p", "3", "--nu", "2"]);
    let v = json(&o);
    let failed = v["comparisons"]["checks"].as_array().unwrap().iter().any(|c| c["status"] == "fail");
    assert_eq!(o.status.code(), Some(if failed { 1 } else { 0 }));

    let o = spi(dir.path(), &["aut", "--p", "7", "--nu", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("limited to 3000"));
}

#[test]
fn witness_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = spi(dir.path(), &["witness", "--p", "2", "--nu", "2", "--from", "1,0,0,0", "--to", "1,0,0,0", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["verified"], true);
    let o = spi(dir.path(), &["witness", "--p", "2", "--nu", "2", "--from", "1,0,0,0", "--to", "0,0,0,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim().split(';').count(), 4);
    let o = spi(dir.path(), &["witness", "--p", "2", "--nu", "2", "--from", "1,0,0,0", "--to", "1,0,0,0;0,1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spi(dir.path(), &["witness", "--p", "2", "--nu", "2", "--from", "1,x", "--to", "1,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let o = spi(dir.path(), &["export", "--p", "2", "--nu", "1", "--dot"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert_eq!(dot.matches("[label=").count(), 3);
    assert_eq!((0..3).filter(|i| dot.contains(&format!("v{i} -- v{i};"))).count(), 3);

    let args = ["export", "--p", "2", "--nu", "2", "--out", out.to_str().unwrap()];
    assert!(spi(dir.path(), &args).status.success());
    let first = std::fs::read(&out).unwrap();
    assert_eq!(String::from_utf8_lossy(&first).matches("[label=").count(), 65);
    assert!(spi(dir.path(), &args).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let one = spi(dir.path(), &["analyze", "--p", "3", "--nu", "2", "--threads", "1"]);
    let many = spi(dir.path(), &["analyze", "--p", "3", "--nu", "2", "--threads", "4"]);
    assert_eq!(one.stdout, many.stdout);
    let one = spi(dir.path(), &["orbits", "--p", "2", "--nu", "2", "--edges", "--words", "--threads", "1"]);
    let many = spi(dir.path(), &["orbits", "--p", "2", "--nu", "2", "--edges", "--words", "--threads", "4"]);
    assert_eq!(one.stdout, many.stdout);
}
