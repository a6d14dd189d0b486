use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnorm-lab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn norm_of_constant_one_brackets_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "const1.json", r#"{"breakpoints":[0,1],"values":[1,1]}"#);
    let r = json(&run(&["norm", "--base", "leveled:i=1,levels=8", "--fn", &f]));
    let (lo, hi) = (r["results"]["norm"]["lo"].as_f64().unwrap(), r["results"]["norm"]["hi"].as_f64().unwrap());
    assert!(lo <= 1.0 && 1.0 <= hi, "[{lo}, {hi}]");
    assert_eq!(r["command"], "norm");
}

#[test]
fn witness_with_delta_above_eps_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.json", r#"{"breakpoints":[0,1],"values":[0.5,0.5]}"#);
    let o = run(&["slice-witness", "--fn", &f, "--dirac", "0", "--eps", "0.3", "--delta", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn combo_bound_near_half_root_two() {
    let r = json(&run(&["combo-diam", "--i", "2", "--eta", "0.001", "--budget", "10000", "--seed", "7"]));
    let b = r["results"]["combo"]["bound"].as_f64().unwrap();
    assert!(b > 2f64.sqrt() / 2.0 && b < 0.76, "{b}");
}

#[test]
fn unknown_flag_and_missing_seed_exit_one() {
    let o = run(&["norm", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert_eq!(run(&["combo-diam", "--i", "2", "--eta", "0.001"]).status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = ["a.json", "b.json"]
        .iter()
        .map(|name| {
            let p = dir.path().join(name);
            let o = run(&["mlur-modulus", "--fn", &write(dir.path(), "x.json", r#"{"breakpoints":[0,0.5,1],"values":[0,1,0]}"#),
                "--eps", "0.2", "--budget", "300", "--seed", "3", "--out", p.to_str().unwrap()]);
            assert!(o.status.success());
            std::fs::read(p).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert!(!outs[0].is_empty());
}

#[test]
fn enclosures_carry_both_endpoints() {
    let r = json(&run(&["dual-norm", "--dirac", "0.5", "--budget", "500", "--seed", "1"]));
    let s = r.to_string();
    assert!(s.contains("\"lower\"") && s.contains("\"upper\""), "{s}");
}

#[test]
fn csv_diameter_has_one_row_per_pair() {
    let o = run(&["diam", "--dirac", "0.5", "--eps", "0.2", "--budget", "200", "--seed", "5", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let cols = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').count() == cols));
}

#[test]
fn csv_is_refused_where_unsupported() {
    assert_eq!(run(&["c0-control", "--dim", "2", "--eps", "0.5", "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn c0_control_reports_gap_one() {
    let r = json(&run(&["c0-control", "--dim", "3", "--eps", "0.1"]));
    let c = &r["results"]["control"];
    assert_eq!(c["p_norm"].as_f64(), Some(1.0));
    assert_eq!(c["i_minus_p_norm"].as_f64(), Some(1.0));
    assert_eq!(c["gap"].as_f64(), Some(1.0));
}

#[test]
fn nested_product_for_doubling_exponents() {
    let r = json(&run(&["nested", "--p", "geometric:base=2,start=4", "--op", "product"]));
    assert_eq!(r["results"]["holds"], Value::Bool(true));
    assert!((r["results"]["product"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
}
