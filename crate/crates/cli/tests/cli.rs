use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn dimer(args: &[&str]) -> Output {
    dimer_env(args, &[])
}

fn dimer_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dimer"));
    cmd.args(args).env_remove("DIMER_STATE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_file(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn report_envelope_has_fixed_keys() {
    let out = stdout(&dimer(&["estimate", "--d", "3"]));
    let keys = ["\"command\"", "\"inputs_digest\"", "\"results\"", "\"tool_version\"", "\"wall_time_seconds\""];
    let pos: Vec<usize> = keys.iter().map(|k| out.find(k).expect(k)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "dimer estimate --d 3");
    assert!(v["inputs_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn same_inputs_same_digest() {
    let a = json(&dimer(&["estimate", "--d", "3"]));
    let b = json(&dimer(&["estimate", "--policy", "as-is", "--d", "3"]));
    let c = json(&dimer(&["estimate", "--d", "4"]));
    assert_eq!(a["inputs_digest"], b["inputs_digest"]);
    assert_eq!(a["results"], b["results"]);
    assert_ne!(a["inputs_digest"], c["inputs_digest"]);
}

#[test]
fn estimate_builtin() {
    let v = json(&dimer(&["estimate", "--d", "3"]));
    let e = &v["results"]["estimate"];
    assert_eq!(e["g"], 2);
    assert_eq!(e["a"], "0.4531");
    assert_eq!(e["b"], "0.0014");

    let v = json(&dimer(&["estimate", "--d", "5", "--policy", "double-if-terminal", "--display-digits", "4"]));
    let r = &v["results"];
    assert_eq!(r["estimate"]["g"], 4);
    assert_eq!(r["estimate"]["b"], "0.0002");
    assert_eq!(r["estimate"]["policy_applied"], "doubled");
    assert_eq!(r["display"]["a"], "0.6786");
}

#[test]
fn estimate_csv() {
    let out = stdout(&dimer(&["estimate", "--d", "2", "--format", "csv"]));
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("d,label,policy,g,a,"));
    assert!(lines.next().unwrap().starts_with("2,reference table,as-is,2,0.2957,0.0072,0.0072,"));
}

#[test]
fn estimate_from_files() {
    let f = temp_file(r#"{"d": 7, "B": [".5", ".625"], "label": "two terms"}"#, ".json");
    let v = json(&dimer(&["estimate", "--input", f.path().to_str().unwrap()]));
    let e = &v["results"]["estimate"];
    assert_eq!(e["g"], 0);
    assert_eq!(e["a"], "0.5625");
    assert_eq!(e["terminal_pair"], true);

    let f = temp_file("d,B0,B1,B2\n6,.7,.72,.7199\n", ".csv");
    let v = json(&dimer(&["estimate", "--input", f.path().to_str().unwrap()]));
    assert_eq!(v["results"]["estimate"]["g"], 1);
    assert_eq!(v["results"]["series"]["B"][2], ".7199");
}

#[test]
fn echoed_series_loads_back() {
    let v = json(&dimer(&["estimate", "--d", "4"]));
    let text = serde_json::to_string(&v["results"]["series"]).unwrap();
    let s = dimer::table::load_series(text.as_bytes(), dimer::table::SeriesFormat::Json).unwrap();
    assert_eq!(s, dimer::table::builtin_series(4).unwrap());
}

#[test]
fn malformed_input_exits_3() {
    let f = temp_file(r#"{"d": 3, "B": [".4", "1e-3"]}"#, ".json");
    let out = dimer(&["estimate", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("B[1]"));

    let f = temp_file("{\"d\": 3,\n \"B\": [\".4\",,]}", ".json");
    let out = dimer(&["estimate", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let f = temp_file(r#"{"d": 3, "B": [".4"]}"#, ".json");
    assert_eq!(code(&dimer(&["estimate", "--input", f.path().to_str().unwrap()])), 3);
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(code(&dimer(&["estimate", "--d", "7"])), 2);
    assert_eq!(code(&dimer(&["estimate"])), 2);
    assert_eq!(code(&dimer(&["estimate", "--d", "3", "--input", "x.json"])), 2);
    assert_eq!(code(&dimer(&["estimate", "--d", "3", "--policy", "sometimes"])), 2);
    assert_eq!(code(&dimer(&["estimate", "--input", "/nonexistent/series.json"])), 2);
    assert_eq!(code(&dimer(&["count", "--dims", "4x0"])), 2);
    assert_eq!(code(&dimer(&["count", "--dims", "4x2", "--boundary", "periodic"])), 2);
    assert_eq!(code(&dimer(&["frobnicate"])), 2);
}

#[test]
fn count_boxes() {
    let v = json(&dimer(&["count", "--dims", "8x8"]));
    assert_eq!(v["results"]["count"], "12988816");
    let v = json(&dimer(&["count", "--dims", "2x2x2", "--engine", "brute"]));
    assert_eq!(v["results"]["count"], "9");
    let v = json(&dimer(&["count", "--dims", "4x4", "--boundary", "periodic"]));
    assert_eq!(v["results"]["count"], "272");
    let v = json(&dimer(&["count", "--dims", "1x3"]));
    assert_eq!(v["results"]["count"], "0");
    assert_eq!(v["results"]["note"], "odd site count");
    assert!(v["results"].get("lambda").is_none());
}

#[test]
fn state_budget_from_environment() {
    let out = dimer_env(&["count", "--dims", "8x8", "--engine", "transfer"], &[("DIMER_STATE_BUDGET", "4")]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("DIMER_STATE_BUDGET"));
    let out = dimer_env(&["count", "--dims", "8x8"], &[("DIMER_STATE_BUDGET", "lots")]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&dimer(&["count", "--dims", "6x6x6"])), 4);
    assert_eq!(code(&dimer(&["count", "--dims", "8x8", "--engine", "brute"])), 4);
}

#[test]
fn scan_square_boxes() {
    let v = json(&dimer(&["scan", "--d", "2", "--max-side", "8"]));
    let records = v["results"]["records"].as_array().unwrap();
    let dims: Vec<&str> = records.iter().map(|r| r["dims"].as_str().unwrap()).collect();
    assert_eq!(dims, ["2x2", "4x4", "6x6", "8x8"]);
    let lambdas: Vec<f64> = records.iter().map(|r| r["lambda"].as_str().unwrap().parse().unwrap()).collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]), "{lambdas:?}");
    assert!(*lambdas.last().unwrap() < 0.2915609);
    assert_eq!(v["results"]["skipped"].as_array().unwrap().len(), 3);

    let v = json(&dimer(&["scan", "--d", "3", "--max-side", "2"]));
    assert_eq!(v["results"]["records"][0]["count"], "9");
    assert_eq!(v["results"]["records"].as_array().unwrap().len(), 1);

    let out = stdout(&dimer(&["scan", "--d", "2", "--max-side", "3", "--format", "csv"]));
    assert_eq!(out.lines().count(), 3, "{out}");
}

#[test]
fn verify_passes() {
    let v = json(&dimer(&["verify"]));
    let checks = v["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 16);
    assert!(checks.iter().all(|c| c["passed"] == true));

    let out = dimer(&["verify", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains(",pass,")).count(), 16);
}
