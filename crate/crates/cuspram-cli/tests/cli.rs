use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_cuspram");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = Command::new(BIN).args(args).args(["--format", "json"]).output().unwrap();
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap_or(Value::Null))
}

#[test]
fn cusps_reduce_level_12_to_4_at_48() {
    let (code, v) = json(&["cusps", "48"]);
    assert_eq!(code, 0);
    let l12 = v["levels"].as_array().unwrap().iter().find(|l| l["d"] == 12).unwrap();
    assert_eq!(l12["delta"], 4);
    assert_eq!(json(&["cusps", "11"]).1["count"], 2);
    assert_eq!(json(&["cusps", "1"]).1["count"], 1);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["gl2", "--p", "5", "--format", "json"]);
    let b = run(&["gl2", "--p", "5", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gl2_over_f3() {
    let (code, v) = json(&["gl2", "--p", "3"]);
    assert_eq!(code, 0);
    let cusp: Vec<&Value> = v["irreps"].as_array().unwrap().iter().filter(|x| x["cuspidal"] == true).collect();
    assert_eq!(cusp.len(), 3);
    assert!(cusp.iter().all(|x| x["dim"] == 2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["gl2", "--p", "4"]).status.code(), Some(2));
    assert_eq!(run(&["gl2", "--p", "7", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["gl2", "--p", "5", "--budget", "100"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["ram"]).status.code(), Some(2));
    assert_eq!(run(&["tsum", "--p", "3", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn ram_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing here\n").unwrap();
    let (code, v) = json(&["ram", empty.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["curves"].as_array().unwrap().len(), 0);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "11a 11 0 -1 1 -10 -20\n48a 48 0 1 0 -4\n").unwrap();
    let out = run(&["ram", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let good = dir.path().join("good.txt");
    fs::write(&good, "48a 48 0 1 0 -4 -4\n").unwrap();
    let report = dir.path().join("r.csv");
    let out = run(&["ram", good.to_str().unwrap(), "--format", "csv", "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("48a,48,4,") && l.split(',').nth(5) == Some("2")));
}

#[test]
fn inconsistent_models_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.txt");
    // the model of 11a under a wrong conductor; 2 does not divide its discriminant
    fs::write(&f, "x 22 0 -1 1 -10 -20\n").unwrap();
    let out = run(&["ram", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N = 22"));
    // and singular at a prime outside the conductor
    fs::write(&f, "x 13 0 -1 1 -10 -20\n").unwrap();
    assert_eq!(run(&["ram", f.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_writes_an_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("nonvanishing.json");
    let out = run(&["verify", "thm43", "--p", "3", "--m", "1", "--artifact", a.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["verdicts"]["nonvanishing"], true);
    assert!(run(&["verify", "gauss", "--dmax", "8", "--mmax", "8"]).status.success());
}

#[test]
fn tsum_single_value() {
    let (code, v) = json(&["tsum", "--p", "5", "--k", "1", "--lambda", "2"]);
    assert_eq!(code, 0);
    let r = v["results"].as_array().unwrap();
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|x| x["is_zero"] == false && x["lambda"] == 2));
}
