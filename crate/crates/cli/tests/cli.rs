use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_harmonic-sieve"));
    c.env_remove("HARMONIC_SIEVE_GUARD");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("harmonic-sieve-{}-{name}", std::process::id()))
}

#[test]
fn audit_z2_two_registers() {
    let out = run(&["audit", "--group", "Z:2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["dim_W"], 3);
    assert_eq!(v["fraction"], 0.75);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["residual"].is_number() || c["skipped"].is_string(), "{c}");
    }
}

#[test]
fn audit_d4_flip_three_registers() {
    let out = run(&["audit", "--group", "D:4", "--subgroup", "flip", "--k", "3", "--trials", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["eta_missing"].as_bool().unwrap());
    assert!(v["fraction"].as_f64().unwrap() >= 0.5);
    let annihilation: Vec<&Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["anchor"] == "annihilation of coset states")
        .collect();
    assert_eq!(annihilation.len(), 7);
    assert!(annihilation.iter().all(|c| c["residual"].as_f64().unwrap() < 1e-9));
}

#[test]
fn malformed_spec_is_usage_error() {
    for args in [
        vec!["group", "--group", "Q:8!"],
        vec!["measure", "--group", "D:4", "--subgroup", "(7,0)"],
        vec!["measure", "--group", "D:4", "--eta", "nonsense"],
        vec!["measure", "--group", "D:4", "--k", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oversized_group_is_resource_error() {
    assert_eq!(run(&["group", "--group", "S:8"]).status.code(), Some(3));
}

#[test]
fn guard_override_refuses_dense_but_allows_ensemble() {
    let dense = bin()
        .env("HARMONIC_SIEVE_GUARD", "100")
        .args(["measure", "--group", "D:4", "--subgroup", "flip", "--k", "3"])
        .output()
        .unwrap();
    assert_eq!(dense.status.code(), Some(3));

    let ens = bin()
        .env("HARMONIC_SIEVE_GUARD", "100")
        .args(["measure", "--group", "D:4", "--subgroup", "flip", "--k", "3", "--mode", "ensemble"])
        .output()
        .unwrap();
    assert_eq!(ens.status.code(), Some(0));
    let v = json(&ens);
    assert!(v["dim_W"].is_null());
    let rows = v["per_subset"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r["annihilation_residual"].as_f64().unwrap() < 1e-9 && r["trace"].is_null()));

    let bad = bin().env("HARMONIC_SIEVE_GUARD", "lots").args(["measure", "--group", "Z:2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn measure_json_schema() {
    let out = run(&["measure", "--group", "D:4", "--subgroup", "flip", "--eta", "sign", "--k", "2", "--trials", "1000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["group", "k", "eta", "dim_W", "fraction", "span_bound", "p_trivial_report", "per_subset"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["group"], "D:4");
    assert_eq!(v["eta"], "sign");
    assert_eq!(v["p_conjugate_report"], 0.0);
    let rows = v["per_subset"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["I"].as_str().unwrap()).collect();
    assert_eq!(names, ["{1}", "{2}", "{1,2}"]);
    // (d²/|G|)·|G|^k = 64/8
    assert!(rows.iter().all(|r| r["trace"] == 8.0));
}

#[test]
fn measure_csv_and_out_file() {
    let path = tmp("measure.csv");
    let out = run(&["measure", "--group", "Z:2", "--k", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,dim_W,fraction,span_bound,p_trivial_report"));
    assert!(lines.next().unwrap().starts_with("2,3,0.75,0.75,"));
    std::fs::remove_file(path).ok();
}

#[test]
fn sweep_z2_fractions() {
    let out = run(&["sweep", "--group", "Z:2", "--k-min", "1", "--k-max", "3", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let fractions: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(fractions, [0.5, 0.75, 0.875]);
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap() <= r[2].parse::<f64>().unwrap());
    }
}

#[test]
fn sweep_empty_range_and_skipped_rows() {
    let empty = run(&["sweep", "--group", "Z:2", "--k-min", "4", "--k-max", "3"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), "k,dim_W,fraction,span_bound,p_trivial_report\n");

    let out = bin()
        .env("HARMONIC_SIEVE_GUARD", "64")
        .args(["sweep", "--group", "D:4", "--subgroup", "flip", "--k-max", "3", "--trials", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(3).unwrap().starts_with("3,skipped(resource)"));
}

#[test]
fn chartable_csv_layout() {
    let out = run(&["chartable", "--group", "Z:3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "irrep,degree,0,1,2");
    assert_eq!(lines[1], "trivial,1,1.000000+0.000000i,1.000000+0.000000i,1.000000+0.000000i");
    assert_eq!(lines.len(), 4);
    assert!(lines[2..].iter().any(|l| l.contains("-0.500000+0.866025i")));
    assert!(lines[2..].iter().any(|l| l.contains("-0.500000-0.866025i")));
}

#[test]
fn harmonics_report_for_a3() {
    let out = run(&["harmonics", "--group", "S:3", "--subgroup", "(1 2 3)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["missing"], serde_json::json!(["standard"]));
    assert_eq!(v["conditions"]["transitive_symmetric"]["status"], "holds");
    assert_eq!(v["conditions"]["small_index"]["status"], "holds");
    assert_eq!(v["conditions"]["degree_sum"], 4);
    assert_eq!(v["cross_check_consistent"], true);
}

#[test]
fn rank_audit_s4() {
    let out = run(&["rank-audit", "--group", "S:4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let subs = v["subgroups"].as_array().unwrap();
    assert_eq!(subs.len(), 30);
    assert!(subs.iter().all(|s| s["regular_rank"] == s["index"] && s["explicit_sum"] == s["index"]));
}

#[test]
fn kickback_report() {
    let out = run(&["kickback", "--group", "D:4", "--irreps", "chi4,chi4", "--eta", "sign", "--trials", "50", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["cross_check_residual"].as_f64().unwrap() < 1e-10);
    assert!(v["intertwining_residual"].as_f64().unwrap() < 1e-10);
    let p = v["p_eta_observed"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn group_summary() {
    let out = run(&["group", "--group", "perm[(1 2 3), (1 2)]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["order"], 6);
    assert_eq!(v["abelian"], false);
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
}
