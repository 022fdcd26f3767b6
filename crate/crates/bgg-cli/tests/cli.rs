use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bgg(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgg")).args(args).env("BGG_CACHE", cache).output().expect("bgg runs")
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cell(table: &Value, i: u64, n: i64) -> Option<u64> {
    table["cells"].as_array()?.iter().find(|c| c["i"] == i && c["n"] == n)?["value"].as_u64()
}

#[test]
fn hilbert_of_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["hilbert", "--builtin", "point2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "χ(n) = 1");
}

#[test]
fn demo_hm_table_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["demo-hm", "--window", "-6:4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let t = &doc["table"];
    for (i, n, h) in [(1, 0, 5), (1, 1, 10), (2, -2, 2), (3, -4, 5), (3, -5, 10)] {
        assert_eq!(cell(t, i, n), Some(h), "h^{i}({n})");
    }
    assert_eq!(cell(t, 0, 0), Some(0));
}

#[test]
fn table_from_file_matches_bott() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["table", "--input", &data("O2.json"), "--window", "-4:3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let t: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for n in -6i64..=3 {
        for i in 0..=2u64 {
            let want = match i {
                0 if n >= 0 => ((n + 1) * (n + 2) / 2) as u64,
                2 if n <= -3 => ((-n - 1) * (-n - 2) / 2) as u64,
                _ => 0,
            };
            if let Some(got) = cell(&t, i, n) {
                assert_eq!(got, want, "h^{i}({n})");
            }
        }
    }
}

#[test]
fn cached_and_fresh_json_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["table", "--builtin", "cubic", "--window", "-3:3", "--json"];
    let fresh = bgg(dir.path(), &args);
    let cached = bgg(dir.path(), &args);
    assert!(String::from_utf8_lossy(&cached.stderr).contains("cache hit"));
    assert!(!String::from_utf8_lossy(&fresh.stderr).contains("cache hit"));
    assert_eq!(fresh.stdout, cached.stdout);
    let mut uncached = args.to_vec();
    uncached.push("--no-cache");
    assert_eq!(bgg(dir.path(), &uncached).stdout, fresh.stdout);
    let other = bgg(dir.path(), &["table", "--builtin", "cubic", "--window", "-3:2", "--json"]);
    assert!(!String::from_utf8_lossy(&other.stderr).contains("cache hit"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = bgg(dir.path(), &["certify", "--builtin", "hm", "--threads", "1", "--json", "--no-cache"]);
    let many = bgg(dir.path(), &["certify", "--builtin", "hm", "--threads", "4", "--json", "--no-cache"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let doc: Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(doc["rank"], 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bgg(dir.path(), &["table", "--builtin", "nope"]).status.code(), Some(2));
    assert_eq!(bgg(dir.path(), &["table", "--builtin", "o2", "--window", "3:1"]).status.code(), Some(2));
    assert_eq!(bgg(dir.path(), &["table", "--builtin", "o2", "--field", "9"]).status.code(), Some(2));
    assert_eq!(bgg(dir.path(), &["frobnicate"]).status.code(), Some(2));
    let o = bgg(dir.path(), &["project", "--builtin", "o2", "--point", "0,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("support meets center"));
    let o = bgg(dir.path(), &["beilinson", "--builtin", "o2", "--window", "-1:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window insufficient"));
}

#[test]
fn saved_windows_are_only_cut_down() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["tate", "--builtin", "o2", "--window", "-3:3", "--json"]);
    let path = dir.path().join("o2_window.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(bgg(dir.path(), &["table", "--input", p, "--window", "-2:2"]).status.code(), Some(0));
    assert_eq!(bgg(dir.path(), &["table", "--input", p, "--window", "-4:2"]).status.code(), Some(1));
}

#[test]
fn projection_of_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["project", "--input", &data("two_points.json"), "--point", "0,0,1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for c in doc["table"]["cells"].as_array().unwrap() {
        if let Some(h) = c["value"].as_u64() {
            assert_eq!(h, if c["i"] == 0 { 2 } else { 0 });
        }
    }
}

#[test]
fn schur_demo_and_betti() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgg(dir.path(), &["demo-schur", "--v", "2", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree"));
    let o = bgg(dir.path(), &["betti", "--input", &data("twisted_cubic.json"), "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ranks: Vec<(i64, i64, u64)> = doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["position"].as_i64().unwrap(), e["twist"].as_i64().unwrap(), e["rank"].as_u64().unwrap()))
        .collect();
    assert_eq!(ranks, vec![(0, 0, 1), (-1, 2, 3), (-2, 3, 2)]);
}
