//! End-to-end runs of the `holonomy-forge` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy-forge")).args(args).output().expect("binary runs")
}

fn campaign(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("campaigns").join(name).display().to_string()
}

fn write(dir: &tempfile::TempDir, name: &str, v: &Value) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.display().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn n0_campaign_passes() {
    let o = bin(&["verify", "campaign", &campaign("holonomy_n0.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], 4);
    assert_eq!(v["failed"], json!([]));
    assert!(v["certificates"][0]["wall_clock_ms"].is_u64());
    assert_eq!(stderr(&o).lines().filter(|l| l.starts_with("PASS ")).count(), 4);
}

#[test]
fn structure_campaign_passes() {
    let o = bin(&["verify", "campaign", &campaign("structure.json"), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn wrong_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({
        "name": "wrong",
        "cases": [{ "id": "c", "algebra": { "n": 0, "basis": { "standard": "C" } }, "expect": { "dim_r": 2 } }]
    });
    let o = bin(&["verify", "campaign", &write(&dir, "c.json", &c)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL c (dim_r: expected 2, got 1)"), "{}", stderr(&o));
}

#[test]
fn case_files_resolve_relative_to_campaign() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir, "spec.json", &json!({ "family": "hol_gamma_n0", "n": 0, "gamma": ["0", "0"] }));
    let c = json!({
        "name": "files",
        "cases": [{ "id": "g", "family_file": "spec.json", "expect": { "special": true, "holonomy": "equal" } }]
    });
    let o = bin(&["verify", "campaign", &write(&dir, "c.json", &c)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ \"family\": ").unwrap();
    for args in [
        vec!["algebra", "build"],
        vec!["berger", "check"],
        vec!["wirr", "check"],
        vec!["metric", "build"],
        vec!["holonomy", "compute"],
        vec!["verify", "campaign"],
    ] {
        let mut a = args.clone();
        let path = p.display().to_string();
        a.push(&path);
        let o = bin(&a);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("invalid JSON"), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn missing_file_and_bad_fields_exit_2() {
    let o = bin(&["algebra", "build", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "s.json", &json!({ "family": "hol_nope", "n": 1 }));
    assert_eq!(bin(&["algebra", "build", &p]).status.code(), Some(2));
    let dup = json!({ "name": "d", "cases": [
        { "id": "a", "algebra": { "n": 0, "basis": { "standard": "C" } } },
        { "id": "a", "algebra": { "n": 0, "basis": { "standard": "C" } } }
    ]});
    assert_eq!(bin(&["verify", "campaign", &write(&dir, "d.json", &dup)]).status.code(), Some(2));
}

#[test]
fn small_center_is_rejected_with_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let s = json!({
        "family": "hol_n_u_psi_k_l", "n": 2, "k": 1, "l": 2,
        "u": { "standard": "u(1..1)" },
        "psi": [{ "z1": ["0", "1"], "z2": [] }]
    });
    let o = bin(&["metric", "build", &write(&dir, "s.json", &s)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dim z(u) >= n+l-2k"), "{}", stderr(&o));
}

#[test]
fn n1_is_not_weakly_irreducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "a.json", &json!({ "n": 1, "basis": { "standard": "N1(1..1)" } }));
    let o = bin(&["wirr", "check", &p, "--probes", "64", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "NotWeaklyIrreducible");
    assert!(v["witness_dim"].as_u64().unwrap() >= 1);
}

#[test]
fn flat_metric_has_trivial_holonomy() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "m.json", &json!({ "n": 1, "f1": [], "f2": [], "f3": [], "u": {} }));
    let o = bin(&["holonomy", "compute", &p, "--max-order", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["dim"], 0);
    assert!(v.get("comparison").is_none());
}

#[test]
fn algebra_outputs_feed_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "s.json", &json!({ "family": "hol_gamma_n0", "n": 0, "gamma": ["1", "1"] }));
    let o = bin(&["algebra", "build", &spec]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let built = stdout_json(&o);
    let alg = write(&dir, "a.json", &built);
    let table = stdout_json(&bin(&["algebra", "bracket-table", &alg]));
    assert_eq!(table["dim"], built["dim"]);
    let berger = bin(&["berger", "check", &alg]);
    assert_eq!(berger.status.code(), Some(0), "{}", stderr(&berger));
    assert_eq!(stdout_json(&berger)["berger"], true);
}

#[test]
fn metric_then_holonomy_matches_family() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "s.json", &json!({ "family": "hol_m_u_lambda", "n": 1, "m": 1, "lambda": "1", "u": { "seven_tuples": [] } }));
    let m = bin(&["metric", "build", &spec]);
    assert_eq!(m.status.code(), Some(0), "{}", stderr(&m));
    let mp = dir.path().join("m.json");
    std::fs::write(&mp, &m.stdout).unwrap();
    let h = bin(&["holonomy", "compute", &mp.display().to_string()]);
    assert_eq!(h.status.code(), Some(0), "{}", stderr(&h));
    let v = stdout_json(&h);
    assert_eq!(v["comparison"]["verdict"], "equal");
    assert_eq!(v["dim"], 4);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.json", &json!({ "n": 0, "basis": { "standard": "A1" } }));
    for args in [
        vec!["wirr", "check", a.as_str(), "--seed", "7"],
        vec!["berger", "check", a.as_str()],
    ] {
        assert_eq!(bin(&args).stdout, bin(&args).stdout, "{args:?}");
    }
    let c = campaign("holonomy_n0.json");
    let args = ["verify", "campaign", c.as_str(), "--no-timings"];
    let first = bin(&args);
    assert_eq!(first.stdout, bin(&args).stdout);
    assert!(!String::from_utf8_lossy(&first.stdout).contains("wall_clock_ms"));
}
