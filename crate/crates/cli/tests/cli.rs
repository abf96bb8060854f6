use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn nile() -> String {
    fixtures().join("nile.csv").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_breakscan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn nile_ols_cusum_rejects() {
    let r = json(&run(&["test", "--method", "ols-cusum", "--level", "0.05", &nile()]));
    assert_eq!(r["schema"], "breakscan.report/1");
    assert_eq!(r["result"]["test"]["crossed"], true);
    assert!(r["result"]["test"]["p_value"].as_f64().unwrap() < 0.05);
    assert_eq!(r["result"]["peak"]["date"], "1898");
    assert!(r.get("runtime_ms").is_none());
}

#[test]
fn rec_cusum_and_long_run_scaling() {
    let r = json(&run(&["test", "--method", "rec-cusum", &nile()]));
    assert_eq!(r["result"]["test"]["boundary"]["lambda"], 0.948);
    let r = json(&run(&["test", "--variance", "long-run", "--bandwidth", "3", &nile()]));
    assert_eq!(r["config"]["variance"]["lags"], 3);
    let out = run(&["test", "--method", "rec-cusum", "--level", "0.07", &nile()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mosum_needs_critical_value() {
    let out = run(&["test", "--method", "mosum", &nile()]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&run(&["test", "--method", "mosum", "--critical", "1.0", &nile()]));
    assert_eq!(r["result"]["test"]["p_value"], Value::Null);
    assert_eq!(r["result"]["window"], 15);
}

#[test]
fn constant_file_gives_zero_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    std::fs::write(&path, "DATE,X\n2001-01-01,4\n2002-01-01,4\n2003-01-01,4\n2004-01-01,4\n").unwrap();
    let r = json(&run(&["test", path.to_str().unwrap()]));
    assert_eq!(r["result"]["test"]["statistic"], 0.0);
    assert_eq!(r["result"]["test"]["p_value"], 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["test", "--no-such-flag", &nile()]).status.code(), Some(2));
    assert_eq!(run(&["segment", "--method", "pelt", &nile()]).status.code(), Some(2));
    assert_eq!(run(&["test", "/definitely/missing.csv"]).status.code(), Some(1));
    assert_eq!(run(&["segment", "--method", "dp", "--min-seg", "60", "--max-breaks", "3", &nile()]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--methods", "dp", &nile()]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn nile_dp_break_in_1898() {
    let r = json(&run(&["segment", "--method", "dp", "--min-seg", "15", "--max-breaks", "5", &nile()]));
    assert_eq!(r["result"]["breaks"], serde_json::json!([28]));
    assert_eq!(r["result"]["break_dates"], serde_json::json!(["1898"]));
    assert_eq!(r["result"]["criterion_trace"].as_array().unwrap().len(), 6);
    let r = json(&run(&["segment", "--method", "dp", "--min-seg", "15%", &nile()]));
    assert_eq!(r["config"]["min_len"], 15);
    assert_eq!(r["config"]["max_breaks"], 5);
}

#[test]
fn transforms_follow_flag_order() {
    let r = json(&run(&["segment", "--method", "dp", "--log", "--returns", "abs", &nile()]));
    let ops: Vec<&str> = r["input"]["transforms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["op"].as_str().unwrap())
        .collect();
    assert_eq!(ops, ["log", "returns"]);
    assert_eq!(r["series"]["n"], 99);
    // Returns first leaves negative values, which have no logarithm.
    assert_eq!(run(&["segment", "--method", "dp", "--returns", "log", "--log", &nile()]).status.code(), Some(1));
    let r = json(&run(&["segment", "--method", "dp", "--window", "1880:1950", &nile()]));
    assert_eq!(r["series"]["first"], "1880");
    assert_eq!(r["series"]["n"], 71);
}

#[test]
fn deflate_by_itself_is_constant() {
    let r = json(&run(&["test", "--deflate", &nile(), &nile()]));
    assert_eq!(r["result"]["test"]["statistic"], 0.0);
}

#[test]
fn wbs_reports_are_byte_identical() {
    let args = ["segment", "--method", "wbs", "--seed", "42", &nile()];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn replay_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["dp", "wbs", "edivisive"] {
        let report = dir.path().join(format!("{method}.json"));
        let out = run(&[
            "segment", "--method", method, "--min-seg", "10", "--permutations", "49", "--out",
            report.to_str().unwrap(), &nile(),
        ]);
        assert!(out.status.success());
        let again = run(&["replay", report.to_str().unwrap()]);
        assert!(again.status.success());
        assert_eq!(std::fs::read(&report).unwrap(), again.stdout, "{method}");
    }
}

#[test]
fn plot_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("seg.csv");
    assert!(run(&["segment", "--method", "dp", "--plot", plot.to_str().unwrap(), &nile()]).status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("date,value,fitted"));
    assert_eq!(lines.next(), Some("1871-01-01,1120,1097.75"));
    assert_eq!(text.lines().count(), 101);

    let plot = dir.path().join("test.csv");
    assert!(run(&["test", "--plot", plot.to_str().unwrap(), &nile()]).status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "date,t,value,boundary_upper,boundary_lower");
    assert!(rows[1].starts_with(",0,0,1.358"));
    assert!(rows[101].starts_with("1970-01-01,1,0,"));
}

#[test]
fn compare_dp_with_itself_and_edivisive_on_a_step() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("step.csv");
    let truth = dir.path().join("truth.csv");
    let out = run(&[
        "synth", "--means", "0,5", "--lengths", "50,50", "--sigma", "0", "--out", sig.to_str().unwrap(), "--truth",
        truth.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&truth).unwrap(), "break,date\n50,0050-01-01\n");
    let r = json(&run(&["compare", "--methods", "dp,edivisive,dp", "--min-seg", "10", sig.to_str().unwrap()]));
    for run in r["result"]["runs"].as_array().unwrap() {
        assert_eq!(run["breaks"], serde_json::json!([50]));
    }
    for d in r["result"]["distances"].as_array().unwrap() {
        assert_eq!(d["max_abs_diff"], 0);
    }
    assert_eq!(r["result"]["table"].as_array().unwrap().len(), 1);
}

#[test]
fn synth_is_reproducible_and_validated() {
    let args = ["synth", "--means", "0,1,-1", "--lengths", "20,20,20", "--sigma", "0.5", "--seed", "7"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
    assert_ne!(a.stdout, run(&["synth", "--means", "0,1,-1", "--lengths", "20,20,20", "--seed", "8"]).stdout);
    assert_eq!(run(&["synth", "--means", "0,1", "--lengths", "20"]).status.code(), Some(2));
    assert_eq!(run(&["synth", "--means", "0", "--lengths", "20", "--noise", "ar1", "--rho", "1.5"]).status.code(), Some(2));
}

#[test]
fn synth_ar1_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("ar.csv");
    let out = run(&[
        "synth", "--means", "0", "--lengths", "20000", "--noise", "ar1", "--rho", "0.5", "--seed", "3", "--out",
        sig.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s = breakscan::io::read_csv(&sig, &breakscan::io::CsvSpec::default()).unwrap();
    let fit = breakscan::series::fit_ar1(&s).unwrap();
    assert!((fit.rho - 0.5).abs() < 0.05, "rho = {}", fit.rho);
}
