use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ramsey-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn omega_l1_linf_plane() {
    let out = ramsey(&["metric", "omega", "--m", "l1:2", "--n", "linf:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
    assert_eq!(v["certificate"], "exact");
}

#[test]
fn fano_exhaust_exit_codes() {
    let base = ["exhaust", "--kind", "grassmannian", "--p", "2", "--k", "1", "--m", "2", "--r", "2", "--no-timing"];
    let three = ramsey(&[&base[..], &["--n", "3"]].concat());
    assert_eq!(three.status.code(), Some(0));
    let v = json(&three);
    assert_eq!(v["outcome"], "all_pass");
    assert!(v.get("millis").is_none());
    assert_eq!(ramsey(&[&base[..], &["--n", "2"]].concat()).status.code(), Some(1));
}

#[test]
fn counterexample_round_trips_through_witness() {
    let csv = std::env::temp_dir().join(format!("ramsey-cli-ce-{}.csv", std::process::id()));
    let csv_s = csv.to_str().unwrap();
    let out = ramsey(&["exhaust", "--kind", "grassmannian", "--k", "1", "--m", "2", "--n", "2", "--counterexample", csv_s]);
    assert_eq!(out.status.code(), Some(1));
    let w = ramsey(&["witness", "--input", csv_s, "--m", "2"]);
    assert_eq!(w.status.code(), Some(1));
    assert_eq!(json(&w)["found"], false);
}

#[test]
fn min_n_fano() {
    let out = ramsey(&["min-n", "--kind", "grassmannian", "--k", "1", "--m", "2", "--n-range", "1..=5", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["min_n"], 3);
}

#[test]
fn rcef_of_transposed_f5_example() {
    let m = scratch("a.mat", "5 6 3\n1 0 0\n2 0 0\n0 1 0\n3 4 0\n0 0 1\n1 2 3\n");
    let out = ramsey(&["rcef", "--input", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tau"], serde_json::json!([[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
    assert_eq!(v["ia"], serde_json::json!([[1, 0, 0], [0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 1], [0, 0, 0]]));
}

#[test]
fn enumerate_counts() {
    let out = ramsey(&["enumerate", "--kind", "grassmannian", "--p", "2", "--n", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["count"], 7);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ramsey(&["exhaust", "--bogus"]).status.code(), Some(2));
    // sampling without a seed
    let sampled = ["exhaust", "--kind", "grassmannian", "--k", "1", "--m", "2", "--n", "3", "--budget", "10"];
    assert_eq!(ramsey(&sampled).status.code(), Some(2));
    assert_eq!(ramsey(&["verify", "--suite", "nope", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(ramsey(&["metric", "bm", "--m", "l1:2", "--n", "l2:2"]).status.code(), Some(2));
    assert_eq!(ramsey(&["metric", "omega", "--m", "l1:2", "--n", "l1:3"]).status.code(), Some(2));
}

#[test]
fn tol_refutes_loose_results() {
    let ok = ramsey(&["metric", "omega", "--m", "l1:2", "--n", "linf:2", "--tol", "1e-9"]);
    assert_eq!(ok.status.code(), Some(0));
    let tight = ramsey(&["metric", "omega", "--m", "l1:2", "--n", "linf:2", "--tol", "1e-15"]);
    assert_eq!(tight.status.code(), Some(1));
}

#[test]
fn verify_is_byte_identical_across_jobs() {
    let run = |jobs: &str| {
        let out = ramsey(&["verify", "--suite", "gf_invariants,ramsey_desk", "--seed", "3", "--budget", "5", "--no-timing", "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let v: Value = serde_json::from_slice(&one).unwrap();
    assert_eq!(v["certified_pass"], true);
}

#[test]
fn operator_file_with_shorthand_norms() {
    let t = scratch("t.json", r#"{"matrix": [[1, 1], [0, 1]], "domain": "l2:2", "codomain": "l2:2"}"#);
    let out = ramsey(&["metric", "op-norm", "--input", t.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((json(&out)["value"].as_f64().unwrap() - golden).abs() < 1e-9);
}
