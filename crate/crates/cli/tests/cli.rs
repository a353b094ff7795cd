use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn qset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qset"))
        .args(args)
        .env("QSET_COLOR", "0")
        .output()
        .unwrap()
}

fn script(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scripts")
        .join(name)
        .display()
        .to_string()
}

fn temp_script(name: &str, src: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qset-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn powerset_script_passes() {
    let o = qset(&["eval", &script("powerset.qst")]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("checks: 3 passed, 0 failed"));
}

#[test]
fn failing_check_exits_one() {
    let p = temp_script("fail.qst", "kind K\ncheck eq(qc({m_K^2}), 3)\n");
    let o = qset(&["eval", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(&format!("check failed at {p}:2:1")));
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = qset(&["eval", "definitely-missing.qst"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("definitely-missing.qst"));
}

#[test]
fn json_mode_keeps_stdout_clean_on_error() {
    let p = temp_script("bad.qst", "let x = pow(\n");
    let o = qset(&["eval", &p, "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with(&format!("{p}:1:")));
}

#[test]
fn eval_json_lists_values_and_checks() {
    let o = qset(&["eval", &script("powerset.qst"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "qset/1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    assert_eq!(v["values"][0], "{{m_K^2}, {m_K}^2, {}}");
}

#[test]
fn caps_have_hard_limits() {
    assert_eq!(qset(&["laws", "--cap-power", "25"]).status.code(), Some(2));
    assert_eq!(
        qset(&["laws", "--cap-product", "99999999"]).status.code(),
        Some(2)
    );
    assert_eq!(qset(&["laws", "--depth", "7"]).status.code(), Some(2));
}

#[test]
fn cap_override_reaches_the_evaluator() {
    let p = temp_script("cap.qst", "kind K\nqc(pow({m_K^3}))\n");
    assert_eq!(qset(&["eval", &p]).status.code(), Some(0));
    let o = qset(&["eval", &p, "--cap-power", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:4: error: power operand qcard"));
}

#[test]
fn laws_reports_zero_violations() {
    let o = qset(&["laws", "--samples", "50", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "violations: 0"));
}

#[test]
fn laws_seed_changes_the_sample() {
    let a = qset(&["laws", "--samples", "50", "--seed", "1", "--format", "json"]);
    let b = qset(&["laws", "--samples", "50", "--seed", "2", "--format", "json"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn audit_of_a_fragment() {
    let o = qset(&["audit", &script("fragment.qst"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "qset/1");
    assert_eq!(v["elements"].as_array().unwrap().len(), 5);
    assert!(!v["defects"]["cond1"].as_array().unwrap().is_empty());
}

#[test]
fn audit_of_seed_qset_uses_depth() {
    let p = temp_script("seeds.qst", "kind K\n{{m_K}}\n");
    let o0 = qset(&["audit", &p, "--depth", "0", "--format", "json"]);
    let o1 = qset(&["audit", &p, "--depth", "1", "--format", "json"]);
    let v0: serde_json::Value = serde_json::from_slice(&o0.stdout).unwrap();
    let v1: serde_json::Value = serde_json::from_slice(&o1.stdout).unwrap();
    assert_eq!(v0["elements"].as_array().unwrap().len(), 1);
    assert_eq!(v1["elements"].as_array().unwrap().len(), 5);
}

#[test]
fn audit_rejects_other_values() {
    let p = temp_script("nat.qst", "kind K\nqc({m_K})\n");
    assert_eq!(qset(&["audit", &p]).status.code(), Some(2));
}

#[test]
fn no_color_when_disabled() {
    let p = temp_script("color.qst", "qc(zzz)\n");
    let o = qset(&["eval", &p]);
    assert!(!String::from_utf8_lossy(&o.stderr).contains('\x1b'));
}

#[test]
fn repl_reads_statements_and_recovers_from_errors() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qset"))
        .arg("repl")
        .env("QSET_COLOR", "0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"kind K\nqc(nope)\nqc(pow({m_K^2}))\n:quit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("<stdin>:1:4"));
}

#[test]
fn category_script_passes() {
    let o = qset(&["eval", &script("category.qst")]);
    assert_eq!(o.status.code(), Some(0));
}
