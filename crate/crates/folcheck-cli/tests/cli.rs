//! End-to-end runs of the `folcheck` binary: output shape and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn folcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folcheck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("folcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn verify_single_case_passes() {
    let o = folcheck(&["verify", "xi-psi-w6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ratio = 1296"));
}

#[test]
fn verify_json_is_deterministic() {
    let a = folcheck(&["--json", "verify", "g3-wedge2", "--n", "9"]);
    let b = folcheck(&["--json", "verify", "g3-wedge2", "--n", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["reports"][0]["status"], "pass");
    assert_eq!(doc["reports"][0]["params"]["n"], 9);
}

#[test]
fn exit_codes() {
    assert_eq!(folcheck(&["verify", "no-such-case"]).status.code(), Some(2));
    assert_eq!(folcheck(&["verify", "g3-wedge2", "--param", "zz=1"]).status.code(), Some(2));
    assert_eq!(folcheck(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(folcheck(&["verify", "sp-lines-wedge2"]).status.code(), Some(1));
}

#[test]
fn list_filters() {
    let o = folcheck(&["list", "appendix"]);
    let text = stdout(&o);
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("xi-psi") || l.starts_with("hw-certify") || l.starts_with("w6-facts")));
    let o = folcheck(&["--tier", "slow", "list"]);
    assert!(stdout(&o).lines().all(|l| l.contains(" slow ")));
}

#[test]
fn decompose_prints_summands() {
    let o = folcheck(&["decompose", "E6", "L1", "--schur", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension 351"));
    assert!(stdout(&o).contains("L3"));
    assert_eq!(folcheck(&["decompose", "Q3", "L1"]).status.code(), Some(2));
}

#[test]
fn forms_subcommands() {
    let pencil = scratch("pencil.json", r#"[{"mono":[1,0,0,0],"dx":[1],"coeff":"1"},{"mono":[0,1,0,0],"dx":[0],"coeff":"-1"}]"#);
    let o = folcheck(&["--json", "forms", "integrable", "--input", pencil.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["integrable"], true);
    let o = folcheck(&["forms", "psi", "--input", pencil.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "0");
    let bad = scratch("bad.json", "{not json");
    assert_eq!(folcheck(&["forms", "psi", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn pencil_verify() {
    let o = folcheck(&["--json", "pencil", "verify", "--partition", "2,1,1", "--values", "3,3,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["divisible"], true);
    let o = folcheck(&["pencil", "verify", "--partition", "2,2", "--values", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn extalg_vector() {
    let o = folcheck(&["extalg", "vector", "w24"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("e1,2,3^e1,2,4"));
}
