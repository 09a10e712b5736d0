use std::process::{Command, Output};

use serde_json::Value;

fn dualrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualrank"))
        .args(args)
        .env_remove("DUALRANK_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_emits_the_fixed_schema() {
    let out = dualrank(&["analyze", "--variety", "segre:1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let keys = [
        "spec", "seed", "tolerances", "N", "n", "r", "l", "n_star", "l_star", "r_star",
        "delta_star", "expected_n_star", "gh", "consistency", "audit",
    ];
    assert_eq!(v.as_object().unwrap().len(), keys.len());
    // top-level keys appear in schema order, two-space indented
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| text.find(&format!("\n  \"{k}\":")).unwrap_or_else(|| panic!("{k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v["seed"], 42);
    assert_eq!(v["delta_star"], 1);
    assert_eq!(v["gh"]["verdict"], "all_singular");
    assert_eq!(v["consistency"]["theorem4"], true);
    assert!(v["audit"].is_array());
}

#[test]
fn text_format_is_plain() {
    let out = dualrank(&["analyze", "--variety", "twisted_cubic", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.trim_start().starts_with('{'));
    assert!(text.contains("twisted_cubic"));
}

#[test]
fn bad_spec_exits_two() {
    let out = dualrank(&["analyze", "--variety", "no_such_variety"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert!(v["error"].is_string());
}

#[test]
fn out_of_range_tolerance_is_rejected() {
    let out = dualrank(&["analyze", "--variety", "segre:1,1", "--tol", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_comes_from_flag_then_environment() {
    let env = Command::new(env!("CARGO_BIN_EXE_dualrank"))
        .args(["analyze", "--variety", "segre:1,1"])
        .env("DUALRANK_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 7);
    let flag = Command::new(env!("CARGO_BIN_EXE_dualrank"))
        .args(["analyze", "--variety", "segre:1,1", "--seed", "9"])
        .env("DUALRANK_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["seed"], 9);
}

#[test]
fn gh_modes_agree() {
    for mode in ["probabilistic", "interpolated", "auto"] {
        let out = dualrank(&["analyze", "--variety", "segre:1,3", "--gh-mode", mode]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
        let v = json(&out);
        if mode == "auto" {
            assert!(v["gh"]["mode"] == "interpolated" || v["gh"]["mode"] == "probabilistic");
        } else {
            assert_eq!(v["gh"]["mode"], mode);
        }
        assert_eq!(v["gh"]["verdict"], "all_singular", "{mode}");
    }
}

#[test]
fn table_csv_header_and_rows() {
    let out = dualrank(&["table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("X,N,n,l,r,l*,n*,X*"));
    assert_eq!(lines.count(), 7);
}

#[test]
fn table_output_is_deterministic() {
    let a = dualrank(&["table", "--format", "json"]);
    let b = dualrank(&["table", "--format", "json", "--serial"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a).as_array().unwrap().len(), 7);
}

#[test]
fn foci_on_a_join_line() {
    let out = dualrank(&[
        "foci", "--variety", "join:conic,conic,N=5", "--at", "0.3,-0.5,0.1", "--dir", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!(v["max_root_scan_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn foci_rejects_a_wrong_direction_length() {
    let out = dualrank(&[
        "foci", "--variety", "join:conic,conic,N=5", "--at", "0.3,-0.5,0.1", "--dir", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
