//! CLI contract tests: envelope shape, canonical JSON, exit codes, and the
//! behavior of the installed binary.

use std::process::Command;

use padic_betti::cli::{run_args, Report};
use serde_json::Value;

fn run(args: &[&str]) -> Report {
    let mut argv = vec!["padic-betti"];
    argv.extend_from_slice(args);
    run_args(argv).unwrap()
}

/// Serializing, reparsing, and reserializing must reproduce the same bytes.
fn assert_canonical(report: &Report) {
    let s = report.json.to_string();
    let reparsed: Value = serde_json::from_str(&s).unwrap();
    assert_eq!(reparsed.to_string(), s, "round-trip changed bytes");
    let obj = report.json.as_object().unwrap();
    let keys: Vec<&String> = obj.keys().collect();
    assert_eq!(keys, ["checks", "input", "result"], "envelope keys");
}

#[test]
fn compute_betti_torus() {
    let r = run(&[
        "compute", "--space", "torus:2", "--tower", "abelian:p=3,d=2", "--betti", "1",
        "--format", "json",
    ]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    let result = &r.json["result"];
    assert_eq!(result["limit"]["status"], "converged");
    assert_eq!(result["limit"]["residue"], "2");
    for lv in result["levels"].as_array().unwrap() {
        assert_eq!(lv["value"], "2");
    }
    assert_eq!(r.json["checks"]["monotone"], true);
}

#[test]
fn compute_euler_surface() {
    let r = run(&[
        "compute", "--space", "surface:2", "--tower", "abelian:p=5,d=1", "--euler",
    ]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    assert_eq!(r.json["result"]["limit"]["status"], "converged");
    assert_eq!(r.json["result"]["limit"]["residue"], "0");
    assert_eq!(r.json["checks"]["euler"], true);
    assert!(r.table.contains("euler"), "table names the invariant");
}

#[test]
fn knot_subcommand() {
    let r = run(&["knot", "--delta", "t^2-t+1", "--m", "6", "--p", "5"]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    assert_eq!(r.json["result"]["b1"], 3);
    let root = &r.json["result"]["roots"][0];
    assert_eq!(root["count"], 2);
    assert_eq!(root["stabilized-at"], 0);
    assert_eq!(root["witness-order"], "6");
    assert_eq!(r.json["checks"]["delta-at-one-is-unit"], true);
}

#[test]
fn fab_torsion_subcommand() {
    let r = run(&[
        "fab-torsion", "--matrix", "1+25,5;5,1", "--p", "5", "--precision", "4", "--levels", "3",
    ]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    assert_eq!(r.json["checks"]["routes-agree"], true);
    assert_eq!(r.json["result"]["limit"]["residue"], "301");
    assert_eq!(r.json["result"]["closed-form"]["residue"], "301");
    assert_eq!(r.json["checks"]["no-root-of-unity-eigenvalue"], true);
}

#[test]
fn frattini_subcommand() {
    let r = run(&["frattini", "--group", "C8"]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    assert_eq!(r.json["result"]["length"], 3);
    let orders: Vec<u64> = r.json["result"]["series-orders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(orders, [8, 4, 2, 1]);
    assert_eq!(r.json["checks"]["is-p-group"], true);

    let r2 = run(&["frattini", "--group", "C2xC4"]);
    assert_eq!(r2.json["result"]["length"], 2);
}

#[test]
fn atiyah_subcommand() {
    let matrix = r#"{"generators":["t"],"entries":[[[["t",1],["",-1]]]]}"#;
    let r = run(&[
        "atiyah", "--matrix", matrix, "--d", "1", "--p", "2", "--field", "F3", "--depth", "3",
        "--minors", "1",
    ]);
    assert_eq!(r.exit_code, 0);
    assert_canonical(&r);
    assert_eq!(r.json["result"]["verdict"], "stabilized");
    assert_eq!(r.json["result"]["stabilized"], "1");
    assert_eq!(r.json["result"]["limit"]["status"], "converged");
    assert_eq!(r.json["result"]["limit"]["residue"], "1");
    assert_eq!(r.json["checks"]["minors-agree"], true);
    assert_eq!(r.json["checks"]["dichotomy-bounds-hold"], true);
}

#[test]
fn self_check_flag() {
    let r = run(&["--self-check"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.json["checks"]["all-agree"], true);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(run_args(["padic-betti", "compute", "--space", "klein-bottle", "--tower", "trivial", "--betti", "1"]).is_err());
    assert!(run_args(["padic-betti", "compute", "--space", "torus:2"]).is_err());
    assert!(run_args(["padic-betti", "knot", "--delta", "t+1", "--m", "1", "--p", "2"]).is_err());
    assert!(run_args(["padic-betti", "frattini", "--group", "C6"]).is_err());
}

#[test]
fn binary_writes_canonical_output_file() {
    let dir = std::env::temp_dir().join("padic-betti-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("knot.json");
    let output = Command::new(env!("CARGO_BIN_EXE_padic-betti"))
        .args([
            "knot", "--delta", "t^2-t+1", "--m", "6", "--p", "5", "--format", "json",
            "--output", out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let file = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(stdout, file, "stdout and --output agree");
    assert!(file.ends_with('\n'));
    let v: Value = serde_json::from_str(&file).unwrap();
    assert_eq!(v.to_string(), file.trim_end(), "file holds canonical JSON");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn binary_reports_errors_on_stderr() {
    let output = Command::new(env!("CARGO_BIN_EXE_padic-betti"))
        .args(["knot", "--delta", "t+1", "--m", "1", "--p", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
}
