use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bell-excess"))
        .args(args)
        .env_remove("BELL_EXCESS_THREADS")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn lhv_of_chsh() {
    let v = json(&["lhv", "--builtin", "2/0", "--as-core", "--count"]);
    assert_eq!(v["C"], 2);
    assert_eq!(v["optimizer_count"], "8");
    let t = stdout(&run(&["lhv", "--builtin", "2/0"]));
    assert!(t.contains("C: 2\n"));
}

#[test]
fn lhv_of_files() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.mat");
    fs::write(&zero, "4 2 2\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n").unwrap();
    assert_eq!(json(&["lhv", "--file", zero.to_str().unwrap()])["C"], 0);
    let core = dir.path().join("h4.txt");
    fs::write(&core, "-+++\n+-++\n++-+\n+++-\n").unwrap();
    assert_eq!(json(&["lhv", core.to_str().unwrap(), "--as-core"])["C"], 8);
    let ints = dir.path().join("circ3.txt");
    fs::write(&ints, "0 -1 1\n1 0 -1\n-1 1 0\n").unwrap();
    assert_eq!(json(&["lhv", ints.to_str().unwrap(), "--as-core"])["C"], 4);
    let gyni = dir.path().join("gyni.tensor");
    let out = run(&["construct", "gyni", "2", "--output", gyni.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&["lhv", "--tensor", gyni.to_str().unwrap()])["C"], 2);
}

#[test]
fn bounds_as_core() {
    let v = json(&["bounds", "--builtin", "4/0", "--as-core"]);
    let b = &v["bounds"];
    assert!((b["sigma_bound"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert_eq!(b["best_lower"], 6);
    assert_eq!(b["best_upper"], 8);
    assert_eq!(b["saturated"], true);
}

#[test]
fn bounds_normalized_fourier() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fs4.mat");
    assert!(run(&["construct", "fourier-square", "4", "--output", f.to_str().unwrap()]).status.success());
    let v = json(&["bounds", f.to_str().unwrap(), "--normalize"]);
    let b = &v["bounds"];
    assert_eq!(b["saturated"], true);
    assert!((b["nu_bound"].as_f64().unwrap() - 64.0).abs() < 1e-9);
    assert!((b["gamma"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn tightness_and_excess() {
    let v = json(&["tightness", "--builtin", "8/0"]);
    assert_eq!(v["report"]["vertex_count"], 64);
    assert_eq!(v["report"]["affine_rank"], 63);
    assert_eq!(v["report"]["tight"], true);
    assert_eq!(json(&["excess", "--builtin", "4/0"])["core_excess"], 8);
    let out = run(&["tightness", "--builtin", "2/0", "--format", "json"]);
    assert!(out.status.success());
}

#[test]
fn construct_families() {
    let t = stdout(&run(&["construct", "sylvester", "1"]));
    assert_eq!(t, "++\n+-\n");
    let v = json(&["construct", "paley", "19"]);
    assert_eq!(v["order"], 20);
    assert_eq!(v["hadamard"], true);
    let v = json(&["construct", "circulant", "-1", "1", "1", "1"]);
    assert_eq!(v["hadamard"], true);
    let v = json(&["construct", "gyni", "3"]);
    assert_eq!(v["C"].as_f64().map(|c| (c - 3.0).abs() < 1e-9), Some(true));
    assert_eq!(run(&["construct", "paley", "13"]).status.code(), Some(1));
}

#[test]
fn catalog_commands() {
    let v = json(&["catalog", "list"]);
    assert_eq!(v.as_array().unwrap().len(), 13);
    let t = stdout(&run(&["catalog", "show", "2/0"]));
    assert_eq!(t, "++\n+-\n");
    assert_eq!(run(&["catalog", "show", "16/9"]).status.code(), Some(1));
}

#[test]
fn verify_mquwm_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, "++\n+-\n\n+-\n++\n").unwrap();
    fs::write(&b, "++\n-+\n\n+-\n++\n").unwrap();
    let out = run(&["verify-mquwm", a.to_str().unwrap(), b.to_str().unwrap(), "--a", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().all(|l| l.contains("ok(l=1)")));
    let out = run(&["verify-mquwm", a.to_str().unwrap(), b.to_str().unwrap(), "--a", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_presets() {
    let v = json(&["witness", "--preset", "circ3"]);
    assert!((v["witness"].as_f64().unwrap() - 27f64.sqrt()).abs() < 1e-8);
    let v = json(&["witness", "--preset", "chsh"]);
    assert!((v["witness"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["lhv", "--builtin", "20/0", "--budget", "1000"]).status.code(), Some(2));
    assert_eq!(run(&["lhv", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["lhv"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mat");
    fs::write(&bad, "4 2 2\n1 2\n").unwrap();
    assert_eq!(run(&["lhv", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["lhv", "--builtin", "2/0", "--budget", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_count_is_stable() {
    let one = stdout(&run(&["lhv", "--builtin", "12/0", "--threads", "1"]));
    let four = Command::new(env!("CARGO_BIN_EXE_bell-excess"))
        .args(["lhv", "--builtin", "12/0"])
        .env("BELL_EXCESS_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one, stdout(&four));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let r = run(&["lhv", "--builtin", "8/0", "--format", "json", "--output", out.to_str().unwrap()]);
    assert!(r.status.success() && r.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["C"], 20);
}
