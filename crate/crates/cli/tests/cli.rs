use std::process::{Command, Output};

use serde_json::Value;

fn ddgl2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddgl2"))
        .args(args)
        .env_remove("DDGL2_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn valid_row_verifies() {
    let out = ddgl2(&["verify", "--case", "2.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cases"][0]["status"], "ok");
    assert_eq!(v["cases"][0]["dims"]["R_computed"], 6);
}

#[test]
fn unknown_case_is_a_usage_error() {
    let out = ddgl2(&["verify", "--case", "9.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("9.9"));
    assert_eq!(ddgl2(&["verify"]).status.code(), Some(2));
    assert_eq!(ddgl2(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn oversized_chain_is_refused_before_assembly() {
    let out = ddgl2(&["chain", "--case", "2.1", "--L", "7"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16384"));
    let lowered = ddgl2(&["chain", "--case", "2.1", "--L", "3", "--max-dim", "32"]);
    assert_eq!(lowered.status.code(), Some(3));
}

#[test]
fn listed_relation_failures_do_not_fail_the_run() {
    let out = ddgl2(&["verify", "--case", "6.2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let case = &v["cases"][0];
    assert_eq!(case["status"], "reported");
    assert_eq!(case["relations_pass"], false);
    assert!(case["discrepancies"].as_array().unwrap().iter().all(|d| d["known"] == true));
}

#[test]
fn unlisted_dimension_mismatch_fails() {
    let out = ddgl2(&["verify", "--case", "1.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["cases"][0]["status"], "fail");
    assert_eq!(v["cases"][0]["dims"]["R_computed"], 7);
}

#[test]
fn custom_known_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("known.json");
    std::fs::write(
        &path,
        r#"{"schema": 1, "entries": [
            {"case": "1.1", "kind": "dim_R", "item": "dim_R", "note": "", "reproduce": ""},
            {"case": "1.1", "kind": "pattern", "item": "R(1,4)", "note": "", "reproduce": ""}
        ]}"#,
    )
    .unwrap();
    let out = ddgl2(&["verify", "--case", "1.1", "--known", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&path, "{").unwrap();
    assert_eq!(ddgl2(&["verify", "--case", "1.1", "--known", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn chain_reports_diagonal_symmetry() {
    let out = ddgl2(&["chain", "--case", "2.2", "--L", "3", "--coeff", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["hamiltonian"]["dim"], 64);
    assert_eq!(v["hamiltonian"]["diagonal"], true);
    for g in ["c11", "c22", "d"] {
        assert!(v["symmetry"]["norms"][g]["abs"].as_f64().unwrap() <= 1e-10, "{g}");
    }
}

#[test]
fn chain_dumps_csv() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("h.csv");
    let s = dir.path().join("spec.csv");
    let out = ddgl2(&[
        "chain",
        "--case",
        "1.3",
        "--L",
        "2",
        "--dump-matrix",
        m.to_str().unwrap(),
        "--dump-spectrum",
        s.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spectrum = std::fs::read_to_string(&s).unwrap();
    assert!(spectrum.starts_with("index,re,im\n"));
    assert_eq!(spectrum.lines().count(), 17);
    assert!(std::fs::read_to_string(&m).unwrap().starts_with("row,col,re,im\n"));
}

#[test]
fn root_of_unity_variants() {
    let out = ddgl2(&["rou", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let variants = v["variants"].as_array().unwrap();
    assert_eq!(variants[0]["variant"], "corrected");
    assert_eq!(variants[0]["relations_pass"], true);
    assert_eq!(variants[1]["relations_pass"], false);
    assert!(variants[1]["failed"].as_array().unwrap().iter().any(|f| f == "r4"));
    assert_eq!(ddgl2(&["rou", "--p", "0"]).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ddgl2"))
        .args(["verify", "--case", "2.2", "--seed", "4"])
        .env("DDGL2_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("verify-2.2-seed4.json")).unwrap();
    let v: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["seed"], 4);

    let explicit = dir.path().join("nested").join("x.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_ddgl2"))
        .args(["verify", "--case", "2.2", "--format", "csv", "--out", explicit.to_str().unwrap()])
        .env("DDGL2_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(explicit).unwrap().starts_with("case,"));
}

#[test]
fn catalog_export() {
    let out = ddgl2(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(ddgl2(&["catalog", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["verify", "--case", "3.2", "--case", "6.10", "--seed", "7"];
    assert_eq!(ddgl2(&args).stdout, ddgl2(&args).stdout);
    let chain = ["chain", "--case", "4.3", "--L", "3"];
    assert_eq!(ddgl2(&chain).stdout, ddgl2(&chain).stdout);
}
