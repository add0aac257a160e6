use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn srti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srti")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_check_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = data("roommates4.json");
    let out = dir.path().join("m.json");
    let solved = srti(&["solve", "-i", path_str(&fixture), "--personalize", "--mode", "optimize", "-o", path_str(&out)]);
    assert_eq!(solved.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["objective"], serde_json::json!([1, 2, 4, 2, 4]));

    let checked = srti(&["check", "-i", path_str(&fixture), "--personalize", "--matching", path_str(&out)]);
    assert_eq!(checked.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&checked.stdout).unwrap();
    assert_eq!(report["stable"], Value::Bool(true));
    assert_eq!(report["blocking_pairs"], serde_json::json!([]));
    assert_eq!(report["objective"], doc["objective"]);
}

#[test]
fn check_reports_blocking_pair() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m2.json");
    std::fs::write(&m, r#"{"pairs": [["Ayse", "Duru"], ["Buse", "Cem"]]}"#).unwrap();
    let out = srti(&["check", "-i", path_str(&data("roommates4.json")), "--personalize", "--matching", path_str(&m)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["stable"], Value::Bool(false));
    assert_eq!(report["blocking_pairs"], serde_json::json!([["Buse", "Duru"]]));
}

#[test]
fn exit_codes() {
    assert_eq!(srti(&["solve", "-i", path_str(&data("odd_cycle.json"))]).status.code(), Some(10));
    assert_eq!(srti(&["solve", "-i", "/nonexistent/instance.json"]).status.code(), Some(3));
    assert_eq!(srti(&["solve"]).status.code(), Some(2));
    let bad_objective = srti(&["solve", "-i", path_str(&data("odd_cycle.json")), "--mode", "optimize", "--objective", "nosuch"]);
    assert_eq!(bad_objective.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("g.json");
    let gen = srti(&["generate", "--agents", "60", "--edge-prob", "0.5", "--criteria", "5", "--seed", "1", "-o", path_str(&big)]);
    assert!(gen.status.success());
    let timed = srti(&["solve", "-i", path_str(&big), "--personalize", "--mode", "optimize", "--objective", "dormitory", "--time-limit", "0"]);
    assert!(matches!(timed.status.code(), Some(11 | 12)), "{:?}", timed.status);
}

#[test]
fn unsat_writes_nothing_to_stdout() {
    let out = srti(&["solve", "-i", path_str(&data("odd_cycle.json"))]);
    assert!(out.stdout.is_empty());
}

#[test]
fn generate_batch_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let out = srti(&[
        "generate", "--agents", "8", "--edge-prob", "0.5", "--criteria", "3", "--count", "3", "--ties", "0.2",
        "--departments", "2", "-o", path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 3);
    for f in &files {
        let emitted = srti(&["emit-asp", "-i", path_str(f), "--personalize", "--objective", "smoking,diversity"]);
        assert!(emitted.status.success(), "{}", String::from_utf8_lossy(&emitted.stderr));
        let text = String::from_utf8(emitted.stdout).unwrap();
        let summary = srti_core::encoding::validate_program(&text).unwrap();
        assert_eq!(summary.weak_levels, vec![2, 1]);
    }
}

#[test]
fn generate_is_reproducible() {
    let args = ["generate", "--agents", "12", "--edge-prob", "0.4", "--criteria", "2", "--seed", "5"];
    assert_eq!(srti(&args).stdout, srti(&args).stdout);
}

#[test]
fn derive_json_lists_every_agent() {
    let out = srti(&["derive", "--input", path_str(&data("roommates4.json")), "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v.to_string();
    for name in ["Ayse", "Buse", "Cem", "Duru"] {
        assert!(text.contains(name));
    }
}
