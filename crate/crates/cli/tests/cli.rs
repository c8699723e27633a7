use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

/// A fresh cache directory per test.
fn cache_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("charrank-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cache: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charrank"))
        .args(args)
        .env("CHARRANK_CACHE_DIR", cache)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["format"], "charrank");
    assert_eq!(v["version"], 1);
    v
}

#[test]
fn dual_class_rendering() {
    let dir = cache_dir("dual");
    let out = run(&dir, &["dual", "--k", "3", "--i", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "w1^3 + w3");

    let out = run(&dir, &["--json", "g", "--k", "5", "--i", "5"]);
    let v = json(&out);
    assert_eq!(v["command"], "g");
    assert_eq!(v["result"]["value"], "w5");
}

#[test]
fn scan_reports_zero_degrees() {
    let dir = cache_dir("scan");
    let out = run(&dir, &["scan", "--k", "3", "--hi", "40"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("zeros: 1 5 13 29"),
        "{}",
        stdout(&out)
    );

    let out = run(&dir, &["--json", "scan", "--k", "3", "--hi", "40"]);
    let zeros: Vec<u64> = json(&out)["result"]["zero_degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z.as_u64().unwrap())
        .collect();
    assert_eq!(zeros, [1, 5, 13, 29]);

    let out = run(
        &dir,
        &[
            "scan", "--k", "4", "--kill", "1,2,3", "--lo", "12", "--hi", "12", "--values",
        ],
    );
    assert!(stdout(&out).contains("z_12 = w4^3"), "{}", stdout(&out));
}

#[test]
fn betti_table() {
    let dir = cache_dir("betti");
    let out = run(&dir, &["--json", "betti", "--n", "6", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["result"]["rows"].as_array().unwrap().clone();
    let dims: Vec<u64> = rows.iter().map(|r| r["dim_g"].as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 1, 2, 3, 3, 3, 3, 2, 1, 1]);
    let oriented: Vec<u64> = rows
        .iter()
        .map(|r| r["dim_oriented"].as_u64().unwrap())
        .collect();
    assert_eq!(oriented, [1, 0, 1, 1, 1, 1, 1, 1, 0, 1]);
}

#[test]
fn charrank_and_cup() {
    let dir = cache_dir("charrank");
    let out = run(&dir, &["--json", "charrank", "--n", "8", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["value"]["kind"], "exact");
    assert_eq!(v["result"]["value"]["value"], 6);
    assert_eq!(v["result"]["agrees"], true);

    let out = run(&dir, &["cup", "--n", "8", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("upper bound: 5"), "{text}");
    assert!(text.contains("4 (w2^4)"), "{text}");
}

#[test]
fn json_output_is_reproducible() {
    let dir = cache_dir("repro");
    let args = ["--json", "cup", "--n", "9", "--k", "4"];
    let first = run(&dir, &args);
    let second = run(&dir, &args);
    let uncached = run(
        &dir,
        &["--no-cache", "--json", "cup", "--n", "9", "--k", "4"],
    );
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = cache_dir("usage");
    for args in [
        &["betti", "--n", "5", "--k", "3"][..],
        &["scan", "--k", "3", "--lo", "5", "--hi", "2"],
        &["dual", "--k", "0", "--i", "1"],
        &["bogus"],
        &["verify", "--suite", "nonsense"],
    ] {
        let out = run(&dir, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn capped_scan_exits_with_three() {
    let dir = cache_dir("capped");
    let out = run(&dir, &["charrank", "--n", "11", "--k", "5", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verification_suites() {
    let dir = cache_dir("verify");
    for args in [
        &["verify", "--suite", "zeros", "--hi", "256"][..],
        &["verify", "--suite", "charrank", "--t-max", "5"],
        &["verify", "--suite", "cup", "--t-max", "4"],
        &["verify", "--suite", "points"],
        &[
            "verify",
            "--suite",
            "frobenius",
            "--samples",
            "10",
            "--seed",
            "7",
        ],
    ] {
        let out = run(&dir, args);
        assert_eq!(out.status.code(), Some(0), "{args:?}\n{}", stdout(&out));
        assert!(!stdout(&out).contains("FAIL"), "{args:?}");
    }

    let out = run(
        &dir,
        &["--json", "verify", "--suite", "cup", "--t-max", "4"],
    );
    let v = json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["n"] == 8 && r["k"] == 3));
    assert!(rows.iter().any(|r| r["n"] == 16 && r["k"] == 3));
}

#[test]
fn corrupted_cache_is_discarded() {
    let dir = cache_dir("corrupt");
    let file = dir.join("duals-k3-kill1.txt");
    std::fs::write(&file, "garbage\n").unwrap();
    let out = run(&dir, &["scan", "--k", "3", "--hi", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("zeros: 1 5 13"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("discarding"));
    let header = std::fs::read_to_string(&file).unwrap();
    assert!(
        header.starts_with("charrank-duals v1 k=3 killed=1 up_to=20"),
        "{header}"
    );
}
