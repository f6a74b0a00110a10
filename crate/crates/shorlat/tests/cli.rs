//! End-to-end tests of the command-line interface: documents, formats,
//! determinism, and exit codes (0 ok, 1 recovery failure, 2 usage error).

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn shorlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shorlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn recover_reports_known_instance() {
    let out = shorlat(&["recover", "--x", "614", "--y", "1433", "--bound", "16"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "recover");
    assert_eq!(doc["k"], 3);
    assert_eq!(doc["l"], 7);
    assert_eq!(doc["r_hat"], 10);
    assert_eq!(doc["status"], "recovered");
    assert_eq!(doc["shortest_vector"][0], -14336);
    assert_eq!(doc["shortest_vector"][1], 6144);
    assert_eq!(doc["shortest_vector"][2], 1024);
    assert_eq!(doc["n"], 2048);
}

#[test]
fn recover_failure_exits_one() {
    let out = shorlat(&["recover", "--x", "1", "--y", "1", "--bound", "16"]);
    assert_eq!(exit_code(&out), 1);
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "needs_retry");
    assert_eq!(doc["r_hat"], Value::Null);
}

#[test]
fn recover_out_of_range_is_usage_error() {
    let out = shorlat(&["recover", "--x", "99999", "--y", "0", "--bound", "16"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = shorlat(&["recover", "--nonsense"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn cf_recover_lists_candidates() {
    let out = shorlat(&["cf-recover", "--x", "614", "--bound", "16"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    let candidates: Vec<i64> = doc["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(candidates, vec![1, 3, 7, 10]);
    assert_eq!(doc["accepted"], Value::Null);
    assert_eq!(doc["verified"], false);
}

#[test]
fn cf_recover_with_modular_verifier() {
    // 7 has order 10 modulo 11; candidate 10 is accepted.
    let out = shorlat(&[
        "cf-recover", "--x", "614", "--bound", "16", "--unit", "7", "--modulus", "11",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["accepted"], 10);

    // 3 has order 6 modulo 7, which no candidate matches.
    let out = shorlat(&[
        "cf-recover", "--x", "614", "--bound", "16", "--unit", "3", "--modulus", "7",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stdout_json(&out)["accepted"], Value::Null);
}

#[test]
fn reduce_from_flags_and_relaxed_parameter() {
    let out = shorlat(&["reduce", "--u", "89,0", "--v", "55,1"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["trace"]["t_squared"], "1");
    assert_eq!(doc["shortest_norm_sq"], 89);
    assert!(doc["trace"]["iterations"].as_u64().unwrap() >= 1);

    let out = shorlat(&["reduce", "--u", "89,0", "--v", "55,1", "--t-squared", "3/2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out)["trace"]["t_squared"], "3/2");
}

#[test]
fn reduce_reads_stdin_documents() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_shorlat"))
        .args(["reduce", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(br#"{"u": [2048, 0, 628736], "v": [0, 2048, 1467392]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["reduced"]["u"][0], -14336);
}

#[test]
fn reduce_reads_text_files() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("shorlat-basis-{}.txt", std::process::id()));
    std::fs::write(&path, "# comment\n89 0\n55 1\n").unwrap();
    let out = shorlat(&["reduce", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out)["shortest_norm_sq"], 89);
}

#[test]
fn factor_trials_are_deterministic_and_sound() {
    let args = ["factor", "15", "--trials", "5", "--seed", "1", "--quiet"];
    let a = shorlat(&args);
    let b = shorlat(&args);
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let doc = stdout_json(&a);
    assert!(doc["successes"].as_u64().unwrap() >= 1);
    for rec in doc["records"].as_array().unwrap() {
        assert_eq!(rec["n"], 15);
        if let Some(f) = rec["factor"].as_u64() {
            assert!(f > 1 && f < 15 && 15 % f == 0);
        }
    }
}

#[test]
fn simulate_reports_coprimality_above_half() {
    let out = shorlat(&[
        "simulate", "--r", "101", "--trials", "2000", "--recovery-trials", "20", "--seed", "7",
        "--quiet",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert!(doc["coprimality"]["fraction"].as_f64().unwrap() > 0.5);
    assert_eq!(doc["recovery"]["recovered"], 20);
    // --quiet suppresses the progress note.
    assert!(out.stderr.is_empty());
}

#[test]
fn bench_respects_bound() {
    let out = shorlat(&["bench", "--max-M", "1000", "--trials", "50", "--seed", "3"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["bound_violations"], 0);
    assert_eq!(doc["trials"], 50);
}

#[test]
fn csv_output_renders_rows() {
    let out = shorlat(&[
        "factor", "21", "--trials", "3", "--seed", "2", "--quiet", "--format", "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.split(',').any(|h| h == "factor"));
    assert_eq!(lines.count(), 3);

    let out = shorlat(&["recover", "--x", "614", "--y", "1433", "--bound", "16", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == "r_hat").unwrap();
    assert_eq!(row[idx], "10");
}
