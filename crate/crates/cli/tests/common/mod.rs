//! Helpers for driving the compiled binary from integration tests.

// Each test target compiles its own copy, and no target uses every helper.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn klee(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klee"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the binary, asserts success, and parses standard output as JSON.
pub fn klee_json(args: &[&str]) -> serde_json::Value {
    let output = klee(args);
    assert!(
        output.status.success(),
        "`klee {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

pub fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Scratch file path that survives parallel tests: callers pass file names
/// unique to their test.
pub fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("klee-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir.join(name)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Generates a family instance into a scratch file and returns the path
/// as a string, ready to splice into further invocations.
pub fn generated(file: &str, args: &[&str]) -> String {
    let path = temp_path(file);
    let path = path.to_str().expect("utf-8 temp path").to_string();
    let mut full: Vec<&str> = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let output = klee(&full);
    assert!(
        output.status.success(),
        "`klee {}` failed: {}",
        full.join(" "),
        String::from_utf8_lossy(&output.stderr)
    );
    path
}
