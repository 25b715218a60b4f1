use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn concord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concord"))
        .args(args)
        .env_remove("CONCORD_SEED")
        .output()
        .expect("binary runs")
}

fn json(output: &Output) -> Value {
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(concord(&["--help"]).status.code(), Some(0));
    assert_eq!(concord(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(concord(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        concord(&["measures", "--p1", "1.5", "--p2", "0.2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn undefined_measure_exits_two() {
    let out = concord(&["measures", "--p1", "0", "--p2", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn boundary_risk_gives_infinite_ratio() {
    let v = json(&concord(&["measures", "--p1", "0", "--p2", "0.2"]));
    assert_eq!(v["results"]["P"]["measures"]["RR"], "inf");
}

#[test]
fn envelope_has_command_inputs_results() {
    let v = json(&concord(&[
        "agree", "--p1", "0.1", "--p2", "0.2", "--p3", "0.2", "--p4", "0.7",
    ]));
    assert_eq!(v["command"], "agree");
    assert_eq!(v["inputs"]["strata"]["stratum_q"]["exposed"], 0.7);
    assert_eq!(v["results"]["agrees"], true);
    assert!(v["version"].is_string());
}

#[test]
fn csv_input_matches_flags() {
    let from_file = json(&concord(&["agree", "--in", &fixture("risks.csv")]));
    let from_flags = json(&concord(&[
        "agree", "--p1", "0.1", "--p2", "0.2", "--p3", "0.2", "--p4", "0.7",
    ]));
    assert_eq!(from_file["results"], from_flags["results"]);
}

#[test]
fn bad_csv_value_reports_location() {
    let out = concord(&["measures", "--in", &fixture("bad_value.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("column 3"), "{err}");
}

#[test]
fn modification_test_json_and_csv_agree() {
    let a = json(&concord(&[
        "test-modification",
        "--in",
        &fixture("counts.json"),
    ]));
    let b = json(&concord(&[
        "test-modification",
        "--in",
        &fixture("counts.csv"),
    ]));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["results"]["reject"], true);
    assert_eq!(a["results"]["direction"], "BothBelow");
}

#[test]
fn zero_cell_rejected_unless_corrected() {
    let path = fixture("zero_cell.csv");
    assert_eq!(
        concord(&["test-modification", "--in", &path]).status.code(),
        Some(2)
    );
    let out = concord(&[
        "test-modification",
        "--in",
        &path,
        "--zero-cells",
        "haldane-anscombe",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let args = [
        "simulate",
        "--trials",
        "20000",
        "--seed",
        "7",
        "--workers",
        "3",
    ];
    let a = json(&concord(&args));
    let b = json(&concord(&args));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["seed"], 7);
    let c = json(&concord(&[
        "simulate",
        "--trials",
        "20000",
        "--seed",
        "8",
        "--workers",
        "3",
    ]));
    assert_ne!(a["results"]["venn"], c["results"]["venn"]);
}

#[test]
fn seed_read_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_concord"))
            .args(["simulate", "--trials", "5000", "--workers", "2"])
            .env("CONCORD_SEED", seed)
            .output()
            .unwrap()
    };
    let from_env = json(&run("42"));
    let from_flag = json(&concord(&[
        "simulate",
        "--trials",
        "5000",
        "--workers",
        "2",
        "--seed",
        "42",
    ]));
    assert_eq!(from_env["seed"], 42);
    assert_eq!(from_env["results"], from_flag["results"]);
}

#[test]
fn simulate_csv_has_all_subsets() {
    let out = concord(&["simulate", "--trials", "2000", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bitmask,members,count,frequency"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn case_reproduces_printed_values() {
    let v = json(&concord(&["case", "hcv-a"]));
    assert_eq!(v["results"]["all_match"], true);
    let values = v["results"]["values"].as_array().expect("values array");
    assert!(values.iter().all(|c| c["matches"] == true));
    assert_eq!(concord(&["case", "nope"]).status.code(), Some(1));
}

#[test]
fn critical_values_for_a_table_row() {
    let v = json(&concord(&[
        "critical", "--p1", "0.1", "--p2", "0.2", "--p3", "0.3", "--kind", "RR",
    ]));
    let text = v["results"].to_string();
    assert!(text.contains("0.6"), "{text}");
}

#[test]
fn out_writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = concord(&[
        "--out",
        path.to_str().unwrap(),
        "exact",
        "--resolution",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "exact");
}
