use std::process::{Command, Output};

use serde_json::Value;

fn mengoli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mengoli"))
        .args(args)
        .env_remove("MENGOLI_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eval_pair_with_oracle() {
    let out = mengoli(&["eval", "--shifts", "-1/2,1/2", "--oracle", "100000", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["shifts"], serde_json::json!(["-1/2", "1/2"]));
    assert_eq!(v["value"], "2");
    assert_eq!(v["method"], "both-fractional");
    assert_eq!(v["oracle"]["N"], 100000);
    assert_eq!(v["oracle"]["pass"], true);
    assert!(v["error_bound"].is_string());
    assert_eq!(v["precision"], 128);
}

#[test]
fn report_keys_in_schema_order() {
    let out = mengoli(&["eval", "--shifts", "1/3,2/5,3", "--oracle", "1000", "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = ["\"shifts\"", "\"value\"", "\"error_bound\"", "\"method\"", "\"oracle\""];
    let pos: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn mengoli_series_is_exact() {
    let out = mengoli(&["eval", "--shifts", "0/1,1/1", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["value"], "1");
    assert_eq!(v["exact"], "1");
    assert_eq!(v["method"], "integer-shifts");
}

#[test]
fn invalid_inputs_exit_2_naming_the_condition() {
    for (args, needle) in [
        (vec!["eval", "--shifts", "1/2,1/2"], "equal shifts"),
        (vec!["eval", "--shifts", "-2,1"], "shift equals negative integer"),
        (vec!["eval", "--shifts", "-3/2,1"], "below -1"),
        (vec!["eval", "--shifts", "1/0,1"], "zero denominator"),
        (vec!["eval", "--shifts", "abc,1"], "cannot parse"),
        (vec!["eval", "--shifts", "1"], "at least 2"),
        (vec!["zeta", "--s", "3"], "s = 2 or 4"),
        (vec!["zeta", "--s", "4", "--w", "2,4"], "w >= 3"),
        (vec!["digamma", "--arg", "-1/2"], "positive"),
        (vec!["eval", "--shifts", "0,1", "--precision", "32"], "64-bit minimum"),
    ] {
        let out = mengoli(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?} wrote partial output");
    }
}

#[test]
fn unknown_flag_is_invalid_input() {
    assert_eq!(mengoli(&["eval", "--bogus"]).status.code(), Some(2));
}

#[test]
fn zeta2_json() {
    let out = mengoli(&["zeta", "--s", "2", "--w", "16,32,64,128", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["target"], "pi^2/6");
    assert!(v["extrapolated"].as_str().unwrap().starts_with("1.6449340668"));
}

#[test]
fn zeta4_text() {
    let out = mengoli(&["zeta", "--s", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pi^4/90"));
    assert!(text.contains("1.08232323"));
}

#[test]
fn digamma_half() {
    let v = json(&mengoli(&["digamma", "--arg", "1/2", "--format", "json"]));
    assert!(v["value"].as_str().unwrap().starts_with("-1.38629436111989"));
}

#[test]
fn perturbation_exits_3() {
    let out = mengoli(&["verify", "--shifts", "0,1", "--N", "1000000", "--perturb", "1e-3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = mengoli(&["verify", "--shifts", "0,1", "--N", "1000000"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn random_verify_is_deterministic() {
    let args = [
        "verify", "--trials", "12", "--seed", "42", "--max-den", "24", "--max-factors", "3", "--N", "100000", "--format",
        "json",
    ];
    let a = mengoli(&args);
    let b = mengoli(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], 12);
    assert_eq!(v["failed"], 0);
}

#[test]
fn eval_json_is_byte_identical() {
    let args = ["eval", "--shifts", "-2/7,1/3,5/2", "--oracle", "10000", "--format", "json"];
    assert_eq!(mengoli(&args).stdout, mengoli(&args).stdout);
}

#[test]
fn printed_rationals_reparse() {
    let v = json(&mengoli(&["eval", "--shifts", "4/6,-3/9,10/4", "--format", "json"]));
    let shifts: Vec<String> = v["shifts"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect();
    assert_eq!(shifts, ["-1/3", "2/3", "5/2"]);
    let again = json(&mengoli(&["eval", "--shifts", &shifts.join(","), "--format", "json"]));
    assert_eq!(again["shifts"], v["shifts"]);
    assert_eq!(again["value"], v["value"]);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mengoli"))
        .args(["eval", "--shifts", "1/3,1/2", "--format", "json"])
        .env("MENGOLI_PRECISION", "256")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["precision"], 256);
    assert!(v["value"].as_str().unwrap().len() > 70);
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = mengoli(&["eval", "--shifts", "0,1,2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["exact"], "1/4");
    assert_eq!(v["method"], "partial-fractions");
}

#[test]
fn bench_reaches_tolerance() {
    let v = json(&mengoli(&["bench", "--shifts", "-1/3,1/4", "--eps", "1e-6", "--format", "json"]));
    assert_eq!(v["oracle_reached"], true);
    assert!(v["oracle_terms"].as_u64().unwrap() >= 1024);
}
