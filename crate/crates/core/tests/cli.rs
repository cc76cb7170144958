use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn normloc(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_normloc")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn game_example() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p3.json", r#"{"n":3,"edges":[[0,1,1],[1,2,1]]}"#);
    let (code, out) = normloc(dir.path(), &["sparsify", "game", "--space", "p3.json", "--m", "2", "--R", "0"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["value"], 0.5);
    assert_eq!(v["result"]["mu_star"], serde_json::json!([0.25, 0.5, 0.25]));
    assert_eq!(v["config"]["command"], "sparsify game");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_config_leaves_no_artifact() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"command":"sparsify game","params":{"m":2,"colour":1}}"#);
    let (code, _) = normloc(dir.path(), &["run", "--config", "bad.json", "--out", "a.json"]);
    assert_eq!(code, 2);
    assert!(!dir.path().join("a.json").exists());
    let (code, _) = normloc(dir.path(), &["onl", "estimate", "--space", "x.json", "--r", "1", "--R", "2", "--trials", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn failed_verification_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.json", r#"{"path":6}"#);
    write(dir.path(), "mu.json", "[1,1,1,1,1,1]");
    write(dir.path(), "d.json", r#"{"clusters":[[0,1],[3]]}"#);
    let args = ["sparsify", "verify", "--space", "x.json", "--measure", "mu.json", "--decomposition", "d.json"];
    let (code, out) = normloc(dir.path(), &[&args[..], &["--m", "3", "--dmax", "1", "--c", "0.5", "--out", "r.json"]].concat());
    assert_eq!(code, 2);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["report"]["separation_ok"], false);
    let (code, _) = normloc(dir.path(), &[&args[..], &["--m", "2", "--dmax", "1", "--c", "0.5"]].concat());
    assert_eq!(code, 0);
}

#[test]
fn run_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.json", r#"{"path":40}"#);
    write(
        dir.path(),
        "cfg.json",
        r#"{"command":"onl localize","params":{"space":"x.json","r":1.0,"m":3,"k":4},"seed":7}"#,
    );
    let (code, a) = normloc(dir.path(), &["run", "--config", "cfg.json"]);
    assert_eq!(code, 0);
    let (code, b) = normloc(dir.path(), &["--seed", "7", "onl", "localize", "--space", "x.json", "--r", "1", "--m", "3", "--k", "4"]);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["result"]["chain"]["holds"], true);
}

#[test]
fn decay_csv_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = normloc(
        dir.path(),
        &["expander", "decay", "--family", "cycles", "--sizes", "20,10", "--R", "2", "--eps", "0.1", "--format", "csv"],
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# normloc_version: "));
    assert!(lines[1].starts_with("# config_hash: "));
    assert!(lines[2].starts_with("# config: {"));
    assert_eq!(lines[3], "index,vertices,lambda1,degree,certificate,norm,ratio,s_r,bound,seed");
    assert!(lines[4].starts_with("1,10,"));
    assert_eq!(lines.len(), 6);
    let (code, _) = normloc(dir.path(), &["sparsify", "game", "--space", "p.json", "--m", "1", "--R", "0", "--format", "csv"]);
    assert_eq!(code, 2);
}
