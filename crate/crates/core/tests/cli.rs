use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rl-hedge")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn errors_are_json_with_nonzero_exit() {
    let out = cli(&["train", "--agent", "nope"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "usage");

    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["evaluate", "--agent", "dqn", "--out", path(dir.path())]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("agent.json"));
}

#[test]
fn simulate_writes_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["simulate", "--seed", "3", "--out", path(dir.path())]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("path_id,step,time,spot"));
    assert_eq!(lines.count(), 100 * 51);
}

#[test]
fn train_evaluate_compare_flow() {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("config.json");
    std::fs::write(&config, r#"{"episodes": 3, "eval_paths": 20}"#).unwrap();
    let (a, b) = (root.path().join("cmab"), root.path().join("oracle"));

    let c = path(&config);
    assert!(cli(&["train", "--config", c, "--out", path(&a)]).status.success());
    assert!(a.join("agent.json").exists() && a.join("reward_curve.csv").exists());
    assert!(cli(&["evaluate", "--config", c, "--out", path(&a)]).status.success());
    let out = cli(&["evaluate", "--config", c, "--agent", "oracle", "--out", path(&b)]);
    assert!(out.status.success());

    let out = cli(&["compare", path(&a), path(&b), "--out", path(root.path())]);
    assert!(out.status.success());
    let cmp: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cmp["agent_a"], "cmab");
    assert_eq!(cmp["agent_b"], "oracle");
    assert_eq!(cmp["n_paths"], 20);
    assert!(root.path().join("comparison.json").exists());
}
