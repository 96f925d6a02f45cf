use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(file)
}

fn logjet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logjet")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_logjet"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn diagonal_verdict() {
    let o = logjet(&["verdict", corpus("diagonal.logjet").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("summary: reducible, witness m=2"));
}

#[test]
fn line_log_jets() {
    let o = logjet(&["jets", corpus("line-log.logjet").to_str().unwrap(), "--order", "1", "--log"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.trim() == "d1_x - x*dlog1_x"));
}

#[test]
fn bundled_examples_pass() {
    let o = logjet(&["examples"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn json_output_and_overrides() {
    let f = corpus("quadric-cone.logjet");
    let o = logjet(&["verdict", f.to_str().unwrap(), "--semantics", "image", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "logjet-report/1");
    assert_eq!(v["verdict"]["status"], "irreducible");
    assert_eq!(v["verdict"]["citations"], serde_json::json!(["theorem-1", "dimreg"]));
    let o = logjet(&["count", corpus("line-log.logjet").to_str().unwrap(), "--q", "3", "--m", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["counts"][0],
        serde_json::json!({"q": 3, "m": 1, "count": 9, "method": "enumeration", "budget_used": 9})
    );
}

#[test]
fn exit_codes() {
    assert_eq!(logjet(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(logjet(&["verdict", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(with_stdin(&["verdict", "-"], "monoid: x, y\nrelations: x+ = y\n").status.code(), Some(2));
    assert_eq!(with_stdin(&["verdict", "-"], "monoid: x\nchart: p -> y\n").status.code(), Some(3));
    let o = with_stdin(&["count", "-", "--q", "5", "--m", "2", "--budget", "10"], "monoid: x, y\n");
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn char_p_verdict_is_sufficiency_only() {
    let o = logjet(&["verdict", corpus("positive-char.logjet").to_str().unwrap()]);
    let out = stdout(&o);
    assert!(out.contains("verdict: not-asserted"));
    assert!(out.contains("only a sufficient criterion"));
}
