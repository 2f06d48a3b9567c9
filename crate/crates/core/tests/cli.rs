//! Exit codes and file round trips of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tool(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tightpath")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn sample_colour_extract_validate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tool(d, &["--seed", "1", "sample", "--vertices", "16", "--degree", "12", "--out", "g.txt", "--hypergraph", "h.txt"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = tool(d, &["--seed", "3", "colour", "--hypergraph", "h.txt", "--colourer", "killer", "--cluster-size", "6", "--out", "c.txt"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = tool(d, &["--report", "r.json", "extract", "--graph", "g.txt", "--colouring", "c.txt", "--out", "p.txt"]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    match code(&out) {
        0 => {
            assert_eq!(report["colour"], "Red");
            let out = tool(d, &["validate", "--hypergraph", "h.txt", "--colouring", "c.txt", "--path", "p.txt", "--min-length", "3"]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
            let out = tool(d, &["validate", "--hypergraph", "h.txt", "--colouring", "c.txt", "--path", "p.txt", "--min-length", "97"]);
            assert_eq!(code(&out), 3);
        }
        2 => assert_eq!(report["failure"]["class"], "hypothesis"),
        other => panic!("exit {other}: {}", String::from_utf8_lossy(&out.stderr)),
    }
}

#[test]
fn tampered_path_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&tool(d, &["sample", "--vertices", "16", "--degree", "12", "--out", "g.txt", "--hypergraph", "h.txt"])), 0);
    assert_eq!(code(&tool(d, &["colour", "--hypergraph", "h.txt", "--colourer", "all-blue", "--out", "c.txt"])), 0);
    let out = tool(d, &["extract", "--graph", "g.txt", "--colouring", "c.txt", "--out", "p.txt"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(d.join("p.txt")).unwrap();
    fs::write(d.join("red.txt"), text.replacen('B', "R", 1)).unwrap();
    let out = tool(d, &["validate", "--hypergraph", "h.txt", "--colouring", "c.txt", "--path", "red.txt"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn mixer_colouring_exits_with_hypothesis_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&tool(d, &["sample", "--vertices", "16", "--degree", "12", "--out", "g.txt", "--hypergraph", "h.txt"])), 0);
    assert_eq!(code(&tool(d, &["colour", "--hypergraph", "h.txt", "--colourer", "mixer", "--cluster-size", "6", "--budget", "100000", "--out", "c.txt"])), 0);
    let out = tool(d, &["extract", "--graph", "g.txt", "--colouring", "c.txt"]);
    assert_eq!(code(&out), 2);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["failure"]["label"], "cluster_ramsey");
}

#[test]
fn bad_inputs_exit_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&tool(d, &["extract", "--graph", "missing.txt", "--colouring", "c.txt"])), 4);
    fs::write(d.join("g.txt"), "not a graph\n").unwrap();
    assert_eq!(code(&tool(d, &["certify", "--graph", "g.txt", "--n", "4"])), 4);
    assert_eq!(code(&tool(d, &["--oracle-cap", "40", "experiment", "--config", "missing.json"])), 4);
}

#[test]
fn certify_reports_failure_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // two disjoint triangles: large enough sets without an edge between them
    fs::write(d.join("g.txt"), "graph 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n").unwrap();
    let out = tool(d, &["certify", "--graph", "g.txt", "--n", "12", "--sampled", "200"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&tool(d, &["--seed", "2", "sample", "--vertices", "200", "--degree", "40", "--out", "e.txt"])), 0);
    // sets of 100 vertices: the spectral bound of a random 40-regular graph suffices
    let out = tool(d, &["--report", "cert.json", "certify", "--graph", "e.txt", "--n", "400"]);
    assert_eq!(code(&out), 0);
    assert!(fs::read_to_string(d.join("cert.json")).unwrap().contains("\"passed\": true"));
}

#[test]
fn experiment_command_writes_report_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = serde_json::json!({
        "params": {
            "ell": 1, "k": 1, "eps": [1, 2], "t": 6, "t_prime": 6, "c": 1, "a": 10, "n": 2, "m": 2,
            "strict_constants": false, "sizing": "balanced"
        },
        "instance": { "kind": "cycle_power", "vertices": 2, "power": 1 },
        "colourer": { "kind": "uniform_random", "p_blue": 0.7 },
        "trials": 5,
        "seed": 4
    });
    fs::write(d.join("exp.json"), config.to_string()).unwrap();
    let out = tool(d, &["--report", "run.json", "experiment", "--config", "exp.json", "--artifacts", "art"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["aggregate"]["trials"], 5);
    assert!(d.join("art/hypergraph.txt").exists());
    assert!(d.join("art/trial-4.colouring").exists());
}
