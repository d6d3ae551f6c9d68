use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use hdx_cli::RunConfig;
use serde_json::Value;

fn hdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdx")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen_pg2(dir: &Path) -> String {
    let path = dir.join("pg2.json").display().to_string();
    let out = hdx(&["gen", "--kind", "pg-flag", "--q", "2", "--out", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_pg2(dir.path());
    let out = hdx(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["schema"], "hdx-report/1");
    assert_eq!(r["status"], "ok");
    assert_eq!(r["complex"]["f_vector"], serde_json::json!([14, 21]));
    assert_eq!(r["result"]["totals"], serde_json::json!(["42/1", "42/1", "21/1"]));
}

#[test]
fn fano_flag_vertex_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_pg2(dir.path());
    let out = hdx(&["expansion", &path, "--k", "0", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_of(&out)["result"]["records"][0];
    assert_eq!(rec["k"], 0);
    assert_eq!(rec["epsilon"], "1/3");
}

#[test]
fn negative_dimension_parses() {
    let out = hdx(&["expansion", "--spec", r#"{"kind":"full-simplex","v":3}"#, "--k", "-1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["result"]["records"][0]["k"], -1);
}

#[test]
fn certify_writes_certificate_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = hdx(&["certify", "--spec", r#"{"kind":"hollow-simplex","v":5}"#, "--out", cert.to_str().unwrap()]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(doc["schema"], "hdx-cert/1");
    let satisfied = doc["overall"] == "hypotheses-satisfied";
    assert_eq!(out.status.code(), Some(if satisfied { 0 } else { 2 }));

    // An unreachable M-ratio bound fails the hypothesis but still writes the file.
    let strict = dir.path().join("strict.json");
    let out = hdx(&[
        "certify",
        "--spec",
        r#"{"kind":"hollow-simplex","v":5}"#,
        "--m-bound",
        "1/1000000",
        "--out",
        strict.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(strict.exists());
}

#[test]
fn scan_failure_is_exit_two() {
    let ok = hdx(&["scan", "--spec", r#"{"kind":"full-simplex","v":5}"#, "--k", "0"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["result"]["pass"], true);
    // No cochain can reach this ratio.
    let bad = hdx(&["scan", "--spec", r#"{"kind":"full-simplex","v":5}"#, "--k", "0", "--target", "100"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json_of(&bad)["status"], "hypothesis-failure");
}

#[test]
fn errors_exit_one() {
    let out = hdx(&["validate", "/nonexistent/complex.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = hdx(&["certify", "--spec", r#"{"kind":"full-simplex","v":4}"#, "--l", "3"]);
    assert_eq!(out.status.code(), Some(1));

    let out = hdx(&["gen", "--kind", "pg-flag", "--q", "4"]);
    assert_eq!(out.status.code(), Some(1));

    let out = hdx(&["minimize", "--spec", r#"{"kind":"full-simplex","v":4}"#, "--k", "1", "--cochain", "zz"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn minimize_output_is_locally_minimal() {
    let out = hdx(&["minimize", "--spec", r#"{"kind":"full-simplex","v":5}"#, "--k", "1", "--epsilon", "1/8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["result"];
    assert_eq!(r["output_eps_locally_minimal"], true);
    // The seed fixes the input cochain.
    let again = hdx(&["minimize", "--spec", r#"{"kind":"full-simplex","v":5}"#, "--k", "1", "--epsilon", "1/8"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_pg2(dir.path());
    let a = hdx(&["spectral", &path]);
    let b = hdx(&["spectral", &path, "--threads", "1"]);
    let strip = |o: &Output| {
        let mut v = json_of(o);
        v["config"]["knobs"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.stdout, hdx(&["spectral", &path]).stdout);
}

#[test]
fn lemma_suite_flags_corrupted_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.json").display().to_string();
    assert_eq!(hdx(&["gen", "--kind", "full-simplex", "--v", "4", "--out", &path]).status.code(), Some(0));

    let clean = hdx(&["lemma-suite", &path, "--cochains", "4", "--minimize-pairs", "2"]);
    assert_eq!(clean.status.code(), Some(0), "{}", String::from_utf8_lossy(&clean.stderr));
    let stderr = String::from_utf8_lossy(&clean.stderr);
    assert!(stderr.lines().all(|l| l.starts_with("PASS ")));

    let bad = hdx(&["lemma-suite", &path, "--cochains", "4", "--minimize-pairs", "2", "--corrupt", "0,1,7"]);
    assert_eq!(bad.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&bad.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("FAIL summation-law")));
}

#[test]
fn run_config_round_trips() {
    for argv in [
        vec!["hdx", "--seed", "7", "scan", "x.json", "--k", "2", "--override-C", "1/1", "--enforce-spectral"],
        vec!["hdx", "gen", "--kind", "linial-meshulam", "--n", "2", "--v", "7", "--p", "1/2"],
        vec!["hdx", "expansion", "--spec", r#"{"kind":"full-simplex","v":4}"#, "--k", "-1", "--k", "1"],
        vec!["hdx", "lemma-suite", "--threads", "2"],
    ] {
        let cfg = RunConfig::try_parse_from(&argv).unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
