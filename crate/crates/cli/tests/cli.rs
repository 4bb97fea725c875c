//! End-to-end tests of the `cafcc` binary: output, exit codes and JSON.

use std::process::{Command, Output};

use serde_json::Value;

fn cafcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cafcc"))
        .args(args)
        .env_remove("CAFCC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn eval_d1_at_an_affine_point_prints_zero() {
    let o = cafcc(&["eval", "--eq", "D1", "--corners", "1,2,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn eval_prints_canonical_rationals() {
    let o = cafcc(&["eval", "--eq", "A3:d=1", "--point", "x=2,a=1,b=3,c=5,d=7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "9/2\n");
}

#[test]
fn solve_d1_for_the_fourth_corner() {
    let o = cafcc(&["solve", "--eq", "D1", "--slot", "d", "--corners", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
}

#[test]
fn solve_json_reports_a_vanishing_residual() {
    let o = cafcc(&[
        "solve", "--eq", "B3:1/2,0,1/2", "--slot", "b", "--corners", "-2,5,1/3", "--json", "-",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["residual"], "0");
    assert_eq!(doc["seed"], 0);
}

#[test]
fn cafcc_run_passes_and_echoes_the_seed() {
    let o = cafcc(&["cafcc", "--config", "A3:d=0", "--trials", "5", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("seed: 1"), "{text}");
    assert!(text.contains("result: PASS"), "{text}");
}

#[test]
fn seed_falls_back_to_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cafcc"))
        .args(["cafcc", "--config", "ABC:A2,D1,C1", "--trials", "2", "--json", "-"])
        .env("CAFCC_SEED", "42")
        .output()
        .expect("binary runs");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["seed"], 42);
}

#[test]
fn injected_fault_fails_the_full_run_with_failure_json() {
    let o = cafcc(&["suite", "--name", "all", "--trials", "1", "--inject-fault", "14:offset", "--json", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(doc["pass"], false);
    let cafcc = doc["reports"]
        .as_array()
        .expect("reports")
        .iter()
        .find(|r| r["suite"] == "cafcc")
        .expect("cafcc report");
    let failures = cafcc["failures"].as_array().expect("failures");
    assert_eq!(failures.len(), 14, "every system is corrupted");
    assert!(failures.iter().all(|f| f["case"].as_str().unwrap().ends_with("[14:offset]")));
    assert_eq!(failures[0]["residual"]["step6"], "1");
}

#[test]
fn injected_fault_in_a_single_system_exits_one() {
    let o = cafcc(&[
        "cafcc", "--config", "ABC:A3,B3,C3:1/2,0,1/2", "--trials", "3", "--inject-fault", "3:unhat-beta",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("result: FAIL"));
}

#[test]
fn json_is_byte_stable_without_timing() {
    let args = ["lax", "--prop", "P4.2", "--variant", "1", "--trials", "3", "--seed", "7", "--json", "-"];
    let a = cafcc(&args);
    let b = cafcc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("wall_time_ms"));
}

#[test]
fn timing_flag_adds_wall_time() {
    let o = cafcc(&["crosscheck", "--what", "det", "--family", "B3", "--trials", "2", "--timing", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["reports"][0]["wall_time_ms"].is_u64());
}

#[test]
fn crosscheck_builder_against_catalogue() {
    let o = cafcc(&[
        "crosscheck", "--what", "builder-vs-catalogue", "--family", "B3", "--deltas", "1/2,0,1/2", "--trials", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("builder_vs_catalogue   PASS  1 cases"));
}

#[test]
fn json_report_can_be_written_to_a_file() {
    let dir = std::env::temp_dir().join(format!("cafcc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let o = cafcc(&[
        "suite", "--name", "leg_unit", "--trials", "2", "--json", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("leg_unit"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "suite");
    assert_eq!(doc["reports"][0]["suite"], "leg_unit");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn list_names_all_fourteen_systems_and_every_suite() {
    let o = cafcc(&["list", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["systems"].as_array().unwrap().len(), 14);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 13);
    assert_eq!(doc["propositions"].as_array().unwrap().len(), 8);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = cafcc(&["eval", "--eq", "D1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_values_are_usage_errors() {
    assert_eq!(cafcc(&["eval", "--eq", "A9"]).status.code(), Some(2));
    assert_eq!(cafcc(&["eval", "--eq", "D1", "--corners", "1,x,3,4"]).status.code(), Some(2));
    assert_eq!(cafcc(&["cafcc", "--config", "ABC:A3,B2,C2:0,0,0"]).status.code(), Some(2));
    assert_eq!(cafcc(&["suite", "--name", "nonsense"]).status.code(), Some(2));
    assert_eq!(cafcc(&["suite", "--name", "cafcc", "--inject-fault", "15:offset"]).status.code(), Some(2));
}

#[test]
fn filters_selecting_nothing_are_usage_errors() {
    let o = cafcc(&["crosscheck", "--what", "det", "--family", "D1"]);
    assert_eq!(o.status.code(), Some(2));
}
