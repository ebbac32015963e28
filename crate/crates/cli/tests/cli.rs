use std::process::{Command, Output};

use serde_json::Value;

fn partm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partm")).args(args).env_remove("PARTM_MAX_STEPS").output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn run_partm_prints_the_example_trace() {
    let out = partm(&["run", "--semantics", "partm", "--input", "0", "@example1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t=0  active {(q1,0)}  cells 0:{0}  fired i1 i2\n"), "{text}");
    assert!(text.contains("t=3  active {(q4,1)}  cells 0:{0,1} 1:{1}  fired i7\n"));
    assert!(text.ends_with("halted\n"));
}

#[test]
fn machine_files_are_read_from_disk() {
    let dir = std::env::temp_dir().join(format!("partm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("example1.ptm");
    std::fs::write(&path, partm::fixtures::source("example1").unwrap()).unwrap();
    let file = partm(&["run", "--format", "json", "--input", "0", path.to_str().unwrap()]);
    let bundled = partm(&["run", "--format", "json", "--input", "0", "@example1"]);
    assert_eq!(file.status.code(), Some(0));
    assert_eq!(file.stdout, bundled.stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dtm_on_an_ambiguous_machine_is_a_precondition_error() {
    let out = partm(&["run", "--semantics", "dtm", "@forked"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "precondition");
    assert_eq!(diag["ambiguous_groups"], serde_json::json!([[1, 2]]));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(partm(&["run"]).status.code(), Some(2));
    assert_eq!(partm(&["run", "@nosuch"]).status.code(), Some(2));
    assert_eq!(partm(&["run", "/nonexistent/machine.ptm"]).status.code(), Some(2));
    assert_eq!(partm(&["dj", "--n", "2", "--oracle", "proj:5"]).status.code(), Some(2));
    assert_eq!(partm(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn step_budget_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_partm"))
        .args(["run", "--semantics", "dtm", "--format", "json", "@flipper"])
        .env("PARTM_MAX_STEPS", "3")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
    assert_eq!(v["truncated"], true);
}

#[test]
fn every_semantics_emits_json() {
    for sem in ["dtm", "ndtm", "partm", "epartm"] {
        let machine = if sem == "dtm" { "@counter" } else { "@example1_unmarked" };
        let out = partm(&["run", "--semantics", sem, "--format", "json", machine]);
        assert_eq!(out.status.code(), Some(0), "{sem}");
        let v = stdout_json(&out);
        assert!(v.is_object(), "{sem}");
    }
}

#[test]
fn outputs_are_byte_identical_across_invocations() {
    let args = ["run", "--semantics", "epartm", "--format", "json", "@walker", "--max-steps", "6"];
    assert_eq!(partm(&args).stdout, partm(&args).stdout);
}

#[test]
fn axioms_in_both_formats() {
    let text = partm(&["axioms", "@example1"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("A4: forall x. less(x, succ(x))"));
    let s = partm(&["axioms", "@example1", "--variant", "s5", "--format", "structured"]);
    let theory = partm::axioms::text::parse_structured(&String::from_utf8(s.stdout).unwrap()).unwrap();
    assert_eq!(theory.len(), 26);
}

#[test]
fn check_model_reports_failures_for_ambiguous_runs() {
    let ok = partm(&["check-model", "@counter", "--format", "json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout_json(&ok)["results"].as_object().unwrap().values().all(|v| v["status"] == "pass"));
    let bad = partm(&["check-model", "@example1", "--format", "json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["results"]["As_0"]["status"], "fail");
}

#[test]
fn witness_and_catalog() {
    let w = stdout_json(&partm(&["witness", "@example1", "--format", "json"]));
    assert_eq!(w["witness"]["atom"], "S_1(1, 0)");
    assert_eq!(w["witness"]["certified"], true);
    let none = stdout_json(&partm(&["witness", "@flipper", "--format", "json"]));
    assert!(none["witness"].is_null());

    let out = partm(&["modal-check", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v.as_object().unwrap().values().all(|e| e["status"] == "verified"));
}

#[test]
fn compile_dtm_report_and_machine() {
    let out = partm(&["compile-dtm", "@walker", "--steps", "20", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["all_matched"], true);
    assert_eq!(v["steps_per_cycle"].as_array().unwrap().len(), 20);

    let dsl = partm(&["compile-dtm", "@flipper", "--emit-dtm", "--steps", "3"]);
    let text = String::from_utf8(dsl.stdout).unwrap();
    let m = partm::parse_machine(&text).unwrap();
    assert!(partm::validate(&m).deterministic);
}

#[test]
fn deutsch_and_dj_verdicts() {
    for (oracle, verdict) in [("const0", 0), ("const1", 0), ("identity", 1), ("negation", 1)] {
        let v = stdout_json(&partm(&["deutsch", "--oracle", oracle, "--format", "json"]));
        assert_eq!(v["verdict"], verdict, "{oracle}");
        assert_eq!(v["entry_times"].as_array().unwrap().len(), 1);
    }
    let v = stdout_json(&partm(&["dj", "--n", "3", "--oracle", "table:00001111", "--format", "json"]));
    assert_eq!(v["verdict"], 1);
    assert_eq!(v["expected"], 1);
}

#[test]
fn parallelizable_flags_the_anomaly() {
    let v = stdout_json(&partm(&["parallelizable", "--oracle", "anomaly", "--format", "json"]));
    assert_eq!(v["parallelizable"], false);
    assert_eq!(v["superposed"]["result"], serde_json::json!(["0", "1"]));
    assert_eq!(v["classical"]["result"], serde_json::json!(["1"]));
}

#[test]
fn csat_from_dimacs_and_random() {
    let dir = std::env::temp_dir().join(format!("partm-csat-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.cnf");
    std::fs::write(&path, "c sample\np cnf 2 2\n1 2 0\n-1 2 0\n").unwrap();
    let v = stdout_json(&partm(&["csat", path.to_str().unwrap(), "--format", "json"]));
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["probability"], "4/4");
    std::fs::remove_dir_all(&dir).ok();

    let out = partm(&["csat", "--random", "--seed", "11", "--vars", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"] == "accept", v["brute_force"] == true);
}
