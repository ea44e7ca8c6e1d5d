use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn agqss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agqss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cfg(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn analyze_instance_a_both_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let o = agqss(&[
        "analyze",
        &cfg("instance_a.json"),
        "--mode",
        "both",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["thresholds"]["t_forbidden"], 1);
    assert_eq!(report["thresholds"]["t_qualified"], 5);
    assert_eq!(report["soundness"]["theorem1"], true);
    assert_eq!(report["soundness"]["eq7"], true);
    assert_eq!(report["soundness"]["eq8"], true);
    assert!(report["instance"]["hash"].as_str().unwrap().len() == 64);
    assert!(report["tool_version"].as_str().unwrap().starts_with("agqss "));
}

#[test]
fn analyze_is_byte_identical_on_rerun() {
    let a = agqss(&["analyze", &cfg("instance_a.json"), "--full"]);
    let b = agqss(&["analyze", &cfg("instance_a.json"), "--full"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = agqss(&["analyze", &cfg("rs.json"), "--format", "csv"]);
    let d = agqss(&["analyze", &cfg("rs.json"), "--format", "csv"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn analyze_rs_full_has_all_rows() {
    let o = agqss(&["analyze", &cfg("rs.json"), "--full"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["classification"].as_array().unwrap().len(), 8);
    assert_eq!(report["strong_security"].as_array().unwrap().len(), 16);
}

#[test]
fn analyze_csv_is_one_table() {
    let o = agqss(&["analyze", &cfg("rs.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("instance_hash,tool_version,table,"));
    assert_eq!(lines.count(), 8 + 16);
}

#[test]
fn cap_violation_exit_code() {
    let o = agqss(&["analyze", &cfg("instance_b.json"), "--mode", "oracle"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("exceeds cap"));
    let o = agqss(&["analyze", &cfg("rs.json"), "--mode", "oracle", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn instance_b_fast_sweep() {
    let o = agqss(&["analyze", &cfg("instance_b.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["mode"], "fast");
    assert!(report["access"]["exact_forbidden_max_size"].as_i64().unwrap() >= 2);
    assert!(report["access"]["exact_qualified_min_size"].as_i64().unwrap() <= 5);
}

#[test]
fn thresholds_output() {
    let o = agqss(&["thresholds", &cfg("instance_b.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("forbidden ≤ 2, qualified ≥ 5, strong(|Ī|=k): ≤ k+2"));
    let o = agqss(&["thresholds", &cfg("rs.json")]);
    assert!(stdout(&o).contains("forbidden ≤ 1, qualified ≥ 2"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    std::fs::write(
        &path,
        r#"{"field": {"p": 2, "m": 2}, "curve": {"curve": "hermitian", "q0": 2}, "u": 1, "n": 3, "L": 1}"#,
    )
    .unwrap();
    let o = agqss(&["thresholds", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("(vacuous)"), "{}", stdout(&o));
}

#[test]
fn schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"field": {"p": 2, "m": 2}, "curve": {"curve": "hermitian", "q0": 2}, "u": 4, "n": 7, "L": 3}"#,
    )
    .unwrap();
    let o = agqss(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n + L"), "{}", stderr(&o));

    std::fs::write(&path, "{\n\"field\": {\"p\": 2, \"m\": 2},\n\"colour\": 1}").unwrap();
    let o = agqss(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = agqss(&["validate", &dir.path().join("missing.json").display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn deal_and_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let shares = dir.path().join("shares.json");
    let a = cfg("instance_a.json");
    let o = agqss(&[
        "deal",
        &a,
        "--secret",
        "3,2",
        "--seed",
        "11",
        "--out",
        shares.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&shares).unwrap()).unwrap();
    assert_eq!(file["J"].as_array().unwrap().len(), 6);
    assert_eq!(file["seed"], 11);

    // |J| = t_qualified
    let o = agqss(&[
        "reconstruct",
        &a,
        "--shares",
        shares.to_str().unwrap(),
        "--subset",
        "1,2,3,4,6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["secret"], serde_json::json!([3, 2]));

    // forbidden
    let o = agqss(&[
        "reconstruct",
        &a,
        "--shares",
        shares.to_str().unwrap(),
        "--subset",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    assert!(stderr(&o).contains("ambiguous"));
}

#[test]
fn deal_is_deterministic() {
    let a = cfg("instance_a.json");
    let x = agqss(&["deal", &a, "--secret", "1,0", "--seed", "5"]);
    let y = agqss(&["deal", &a, "--secret", "1,0", "--seed", "5"]);
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    let partial = agqss(&["deal", &a, "--secret", "1,0", "--seed", "5", "--subset", "2,4"]);
    let file: Value = serde_json::from_str(&stdout(&partial)).unwrap();
    assert_eq!(file["J"], serde_json::json!([2, 4]));
}

#[test]
fn reconstruct_rejects_other_instance() {
    let dir = tempfile::tempdir().unwrap();
    let shares = dir.path().join("shares.json");
    let o = agqss(&[
        "deal",
        &cfg("instance_b.json"),
        "--secret",
        "1",
        "--out",
        shares.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = agqss(&[
        "reconstruct",
        &cfg("instance_a.json"),
        "--shares",
        shares.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("instance"));
}

#[test]
fn bad_secret_is_rejected() {
    let o = agqss(&["deal", &cfg("rs.json"), "--secret", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = agqss(&["deal", &cfg("rs.json"), "--secret", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_prints_generators() {
    let o = agqss(&["build", &cfg("rs.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["dim_c1"], 2);
    assert_eq!(doc["g2"], serde_json::json!([[2, 3, 4]]));
}

#[test]
fn thread_limit_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_agqss"))
        .args(["analyze", &cfg("rs.json")])
        .env("AGQSS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_agqss"))
        .args(["analyze", &cfg("rs.json")])
        .env("AGQSS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
