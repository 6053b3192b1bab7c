//! End-to-end binary behavior: exit codes, output determinism, reference
//! comparison plumbing.

use std::path::PathBuf;
use std::process::{Command, Output};

fn wdn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wdn"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    wdn().args(args).output().expect("binary runs")
}

#[test]
fn solve_case_a_exits_zero_and_reports_flows() {
    let out = run(&[
        "solve",
        fixture("case_a.wdn").to_str().unwrap(),
        "--reference",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("converged: yes"));
    assert!(text.contains("flow MAE"));
}

#[test]
fn missing_file_exits_one() {
    let out = run(&["solve", "nonexistent.wdn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_error_exits_one() {
    let dir = std::env::temp_dir();
    let path = dir.join("wdn_parse_error_case.wdn");
    std::fs::write(&path, "[OPTIONS]\nheadloss HW\n[WHAT]\n").unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown section"));
}

#[test]
fn validation_error_exits_two() {
    let dir = std::env::temp_dir();
    let path = dir.join("wdn_validation_error_case.wdn");
    // demands do not balance
    std::fs::write(
        &path,
        "[OPTIONS]\nheadloss HW\n[JUNCTIONS]\nj 0 5\n[TANKS]\nt 10 -1 5 0\n[PIPES]\np t j 100 50 130\n",
    )
    .unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unbalanced"));
}

#[test]
fn explicit_loops_flag_requires_section() {
    let dir = std::env::temp_dir();
    let path = dir.join("wdn_noloops_case.wdn");
    std::fs::write(
        &path,
        "[OPTIONS]\nheadloss HW\n[JUNCTIONS]\nj 0 1\n[TANKS]\nt 10 -1 5 0\n[PIPES]\np t j 100 50 130\n",
    )
    .unwrap();
    let out = run(&["solve", path.to_str().unwrap(), "--loops", "explicit"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_economics_exits_two_for_design_and_cost() {
    let dir = std::env::temp_dir();
    let path = dir.join("wdn_missing_econ_case.wdn");
    std::fs::write(
        &path,
        "[OPTIONS]\nheadloss HW\n[JUNCTIONS]\nj 0 1\n[TANKS]\nt 10 -1 15 0\n[PIPES]\np t j 100 50 130\n",
    )
    .unwrap();
    for cmd in ["design", "cost"] {
        let out = run(&[cmd, path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("ECONOMICS"));
    }
}

#[test]
fn machine_output_is_byte_identical_across_runs() {
    let path = fixture("case_b.wdn");
    let a = run(&["solve", path.to_str().unwrap(), "--format", "machine"]);
    let b = run(&["solve", path.to_str().unwrap(), "--format", "machine"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // and it parses as JSON with the expected fields
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pipes"].as_array().unwrap().len(), 9);
    assert_eq!(v["converged"], serde_json::Value::Bool(true));
}

#[test]
fn design_seed_flag_is_deterministic() {
    let path = fixture("case_a.wdn");
    let a = run(&["design", path.to_str().unwrap(), "--seed", "7", "--format", "machine"]);
    let b = run(&["design", path.to_str().unwrap(), "--seed", "7", "--format", "machine"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validate_case_filter_runs_one_case() {
    let out = run(&["validate", "--case", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("case a"));
    assert!(!text.contains("case b"));
}

#[test]
fn solve_with_explicit_loops_matches_auto() {
    let path = fixture("case_b.wdn");
    let auto = run(&["solve", path.to_str().unwrap(), "--format", "machine"]);
    let explicit = run(&[
        "solve",
        path.to_str().unwrap(),
        "--format",
        "machine",
        "--loops",
        "explicit",
    ]);
    assert!(auto.status.success() && explicit.status.success());
    let a: serde_json::Value = serde_json::from_slice(&auto.stdout).unwrap();
    let e: serde_json::Value = serde_json::from_slice(&explicit.stdout).unwrap();
    for (pa, pe) in a["pipes"]
        .as_array()
        .unwrap()
        .iter()
        .zip(e["pipes"].as_array().unwrap())
    {
        let qa = pa["flow_lps"].as_f64().unwrap();
        let qe = pe["flow_lps"].as_f64().unwrap();
        assert!((qa - qe).abs() < 1e-6);
    }
}

#[test]
fn cost_reports_pump_and_wind_tables() {
    let out = run(&["cost", fixture("case_b.wdn").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("44.10"));
    assert!(text.contains("27.14"));
    assert!(text.contains("3334"));
    assert!(text.contains("205.5"));
}
