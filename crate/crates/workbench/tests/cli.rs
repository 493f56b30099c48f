mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use common::{bin, bundle_dir};
use evalbench_core::sample;
use serde_json::{json, Value};

fn evalbench(store: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .arg("--store")
        .arg(store)
        .arg("--bundle")
        .arg(bundle_dir())
        .args(args)
        .env_remove("EVALBENCH_FORMAT")
        .output()
        .unwrap()
}

fn evalbench_stdin(store: &Path, args: &[&str], input: &str) -> Output {
    let mut child = Command::new(bin())
        .arg("--store")
        .arg(store)
        .arg("--bundle")
        .arg(bundle_dir())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bundle_validate_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = evalbench(dir.path(), &["bundle", "validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = Command::new(bin()).args(["bundle", "validate"]).arg(bundle_dir()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(evalbench(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(evalbench(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn out_of_order_submit_exits_1_naming_the_missing_step() {
    let dir = tempfile::tempdir().unwrap();
    let created = stdout_json(&evalbench(dir.path(), &["project", "new", "--problem", sample::PROBLEM]));
    let id = created["project"]["id"].as_str().unwrap().to_string();
    let out = evalbench_stdin(
        dir.path(),
        &["project", "submit", &id, "feature-identification", "--payload", "-"],
        r#"{"features":["scalability"]}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("requirement-recognition"), "{err}");
}

#[test]
fn design_generate_writes_one_csv_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json!({
        "factors": [
            { "name": "A", "kind": "resource", "levels": [1, 2], "role": "design" },
            { "name": "B", "kind": "workload", "levels": ["x", "y", "z"], "role": "design" }
        ],
        "replicates": 3,
        "seed": 11
    });
    let path = dir.path().join("spec.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = evalbench(dir.path(), &["design", "generate", "--spec", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.records().count(), 18);

    let again = evalbench(dir.path(), &["design", "generate", "--spec", path.to_str().unwrap()]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn store_location_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("from-env");
    let out = Command::new(bin())
        .args(["project", "new", "--problem", "env store"])
        .env("EVALBENCH_STORE", &store)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listed = Command::new(bin()).args(["project", "list"]).env("EVALBENCH_STORE", &store).output().unwrap();
    let listed: Value = serde_json::from_slice(&listed.stdout).unwrap();
    assert_eq!(listed.as_array().unwrap().len(), 1);
}

#[test]
fn metrics_match_the_service() {
    let dir = tempfile::tempdir().unwrap();
    let cli = stdout_json(&evalbench(dir.path(), &["bundle", "metrics", sample::THROUGHPUT_FEATURE]));
    let svc = common::Service::start(dir.path());
    let (status, http) = svc.get(&format!("/bundle/metrics?feature={}", sample::THROUGHPUT_FEATURE));
    assert_eq!(status, 200);
    assert_eq!(cli, http);
}
