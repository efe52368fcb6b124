use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BRIDGED_TRIANGLES: &str = "6 7\n1 2 0 1\n1 2 1 2\n1 2 0 2\n1 2 3 4\n1 2 4 5\n1 2 3 5\n1 2 2 3\n";

fn hs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypersketch")).args(args).output().unwrap()
}

fn hs_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypersketch"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn mincut_reports_bridge() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", BRIDGED_TRIANGLES);
    let v = json(&hs(&["mincut", "--hypergraph", &h]));
    assert_eq!(v["weight"], 1.0);
    assert_eq!(v["side"], "000111");
    let v = json(&hs(&["--seed", "5", "mincut", "--hypergraph", &h, "--randomized"]));
    assert_eq!(v["weight"], 1.0);
}

#[test]
fn strength_output() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "3 2\n1 2 0 1\n1 1 2\n");
    let v = json(&hs(&["strength", "--hypergraph", &h]));
    assert_eq!(v["k"], serde_json::json!([1.0, null]));
}

#[test]
fn contract_lists_min_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "3 3\n1 2 0 1\n1 2 1 2\n1 2 0 2\n");
    let v = json(&hs(&["contract", "--hypergraph", &h, "--trials", "300", "--json"]));
    assert_eq!(v["min_weight"], 2.0);
    assert_eq!(v["distinct_cuts"].as_array().unwrap().len(), 3);
}

#[test]
fn sparsify_writes_file_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", BRIDGED_TRIANGLES);
    let out = dir.path().join("s.txt");
    let v = json(&hs(&[
        "sparsify",
        "--hypergraph",
        &h,
        "--epsilon",
        "0.5",
        "--verify",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(v["within_epsilon"], true);
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("6 7\n"));
}

#[test]
fn stream_sparsify_from_stdin() {
    let edges: String = (0..50).map(|i| format!("1 2 {} {}\n", i % 5, (i + 1) % 5)).collect();
    let out = hs_stdin(&["stream-sparsify", "--n", "5", "--epsilon", "0.5"], &edges);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("5 "));

    let out = hs_stdin(&["stream-sparsify", "--n", "3", "--epsilon", "0.5"], "1 2 0 1\n1 2 0 9\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edge 1"));
}

#[test]
fn sat_sketch_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "c example\np cnf 3 3\n1 2 0\n-1 3 0\n-2 -3\n0\n");
    let sketch = dir.path().join("s.json");
    let out = hs(&["sat-sketch", "--cnf", &cnf, "--epsilon", "0.5", "--out", sketch.to_str().unwrap()]);
    assert!(out.status.success());
    for (assignment, want) in [("000", 2.0), ("111", 2.0), ("101", 3.0), ("011", 2.0)] {
        let v = json(&hs(&["sat-eval", "--sketch", sketch.to_str().unwrap(), "--assignment", assignment]));
        assert_eq!(v["estimate"], want, "assignment {assignment}");
    }
    let out = hs(&["sat-eval", "--sketch", sketch.to_str().unwrap(), "--assignment", "01"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gadget_json() {
    let v = json(&hs(&["--seed", "7", "gadget", "--k", "2", "--t", "3", "--b", "0", "--json"]));
    assert_eq!(v["maxcut"], 48.0);
    assert_eq!(v["expected"], 48.0);
    assert_eq!(v["cycle_lengths"], serde_json::json!([7; 8].to_vec()));
    let edges = v["edges"].as_array().unwrap();
    let alice = edges.iter().filter(|e| e["owner"] == "alice").count();
    assert_eq!(alice, 2 * 12);
    assert_eq!(hs(&["gadget", "--k", "2", "--t", "3", "--b", "2"]).status.code(), Some(2));
}

#[test]
fn two_party_chain() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "4 5\n1 2 0 1\n1 2 1 2\n1 2 2 3\n1 2 0 3\n1 2 0 2\n");
    let v = json(&hs(&["two-party", "--graph", &g, "--split-seed", "1"]));
    let (wa, wb, w) = (v["wA"].as_f64().unwrap(), v["wB"].as_f64().unwrap(), v["true_maxcut"].as_f64().unwrap());
    assert_eq!(w, 4.0);
    assert!(2.0 * (wa + wb) <= 3.0 * w && w <= wa + wb);
}

#[test]
fn experiment_reports() {
    let out = hs(&["--seed", "7", "experiment", "gadget-values", "--params", r#"{"k":2,"t":3,"b":0}"#]);
    let v = json(&out);
    assert_eq!(v["experiment"], "gadget-values");
    assert_eq!(v["pass"], true);
    assert_eq!(v["metrics"]["maxcut"], 48.0);
    assert_eq!(v["seed"], 7);
    assert!(v["wall_time_ms"].is_number());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "2 1\n1 2 0 5\n");
    let good = write(dir.path(), "h.txt", BRIDGED_TRIANGLES);
    assert_eq!(hs(&["experiment", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(hs(&["experiment", "gadget-values", "--params", r#"{"bogus": 1}"#]).status.code(), Some(2));
    assert_eq!(hs(&["sparsify", "--hypergraph", &good, "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(hs(&["contract", "--hypergraph", &good, "--alpha", "1.2"]).status.code(), Some(2));
    assert_eq!(hs(&["experiment", "sunflower-count", "--params", r#"{"r": 100000}"#]).status.code(), Some(3));
    let parse = hs(&["mincut", "--hypergraph", &bad]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 2"));
    assert_eq!(hs(&["mincut", "--hypergraph", "/nonexistent/h.txt"]).status.code(), Some(1));
    assert_eq!(hs(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seeds_change_randomized_output() {
    let dir = tempfile::tempdir().unwrap();
    // every triple of 6 vertices, 100 times over: strengths are large, so
    // sampling probabilities are well below one
    let mut lines = String::new();
    for _ in 0..100 {
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    lines += &format!("1 3 {a} {b} {c}\n");
                }
            }
        }
    }
    let h = write(dir.path(), "h.txt", &format!("6 2000\n{lines}"));
    let run = |seed: &str| hs(&["--seed", seed, "sparsify", "--hypergraph", &h, "--epsilon", "0.9"]).stdout;
    let (a, b) = (run("1"), run("2"));
    assert!(a == run("1"), "same seed, different output");
    assert!(a != b, "different seeds, same output");
    assert!(a.len() < 2000 * 8, "nothing was dropped");
}
