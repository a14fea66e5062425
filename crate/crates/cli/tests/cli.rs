use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hkperiod::report::ReportRecord;
use hkperiod::witness::CertPath;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn hkperiod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkperiod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    scenarios().join(name).display().to_string()
}

fn records(out: &Output) -> Vec<ReportRecord> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| ReportRecord::from_jsonl_line(l).unwrap())
        .collect()
}

#[test]
fn lagrangian_certifies_with_exit_zero() {
    let out = hkperiod(&["certify", &scenario("lagrangian.json")]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].path, CertPath::Thm04);
    assert_eq!(recs[0].id, "lagrangian-n2-ell7");
    assert!(recs[0].revalidate().iter().all(|c| c.passed));
}

#[test]
fn gated_scenario_exits_two() {
    let out = hkperiod(&["certify", &scenario("gcd_gate.json")]);
    assert_eq!(out.status.code(), Some(2));
    let recs = records(&out);
    assert_eq!(recs[0].path, CertPath::None);
    assert_eq!(recs[0].failure_reason.as_deref(), Some("gcd(ell, n!*I_X) = 3 > 1"));
}

#[test]
fn unreadable_file_exits_one() {
    let out = hkperiod(&["certify", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));
}

#[test]
fn malformed_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"n\": 2,").unwrap();
    let out = hkperiod(&["certify", p.to_str().unwrap(), &scenario("lagrangian.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(records(&out).len(), 1);
}

#[test]
fn batch_keeps_input_order_and_is_deterministic() {
    let args = [
        "certify",
        &scenario("batch.json"),
        &scenario("rank_one.json"),
        &scenario("lagrangian.json"),
    ];
    let a = hkperiod(&args);
    let b = hkperiod(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ids: Vec<String> = records(&a).into_iter().map(|r| r.id).collect();
    assert_eq!(ids, ["batch-0", "batch-1", "rank-one-n2-ell7", "lagrangian-n2-ell7"]);
}

#[test]
fn order_flag_reaches_the_pipeline() {
    let out = hkperiod(&["certify", &scenario("rank_one.json"), "--order", "thm02-first"]);
    let rec = &records(&out)[0];
    assert_eq!(rec.path, CertPath::Thm02);
    assert!(rec.witness.as_ref().unwrap().theorem_tag.as_str().starts_with("Thm02"));
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.csv");
    let out = hkperiod(&[
        "certify",
        &scenario("lagrangian.json"),
        "--format",
        "csv",
        "--output",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("id,n,ell,path,exponent,twisted_rank"));
    assert!(lines.next().unwrap().starts_with("lagrangian-n2-ell7,2,7,Thm04,"));
}

#[test]
fn timing_adds_wall_time() {
    let out = hkperiod(&["certify", &scenario("lagrangian.json"), "--timing"]);
    assert!(records(&out)[0].wall_time_ms.is_some());
}

#[test]
fn survey_table_and_seed_determinism() {
    let args = [
        "survey",
        "--template",
        &scenario("lagrangian.json"),
        "--ells",
        "5,7,11",
        "--count",
        "6",
        "--seed",
        "9",
    ];
    let a = hkperiod(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, hkperiod(&args).stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["ell,n_samples,thm04,thm02,none", "5,6,6,0,0", "7,6,6,0,0", "11,6,6,0,0"]);
}

#[test]
fn survey_count_zero_and_empty_range() {
    let t = scenario("lagrangian.json");
    let out = hkperiod(&["survey", "--template", &t, "--ells", "5", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ell,n_samples,thm04,thm02,none\n");
    let out = hkperiod(&["survey", "--template", &t, "--ells", "8..10", "--primes"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty ell range"));
}

#[test]
fn oracle_check_reports_no_disagreements() {
    let out = hkperiod(&["oracle-check", "--seed", "3", "--count", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("disagreements=0"));
}

#[test]
fn lattice_queries() {
    let out = hkperiod(&["lattice", "--n", "3", "--v", "0=1,1=1,22=1", "--w", "22=1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q(v) = -2"));
    assert!(text.contains("q(w) = -4"));
    assert!(text.contains("q(v,w) = -4"));
    assert!(text.contains("div(v) | 2n-2 = true"));
    let out = hkperiod(&["lattice", "--n", "3", "--v", "30=1"]);
    assert_eq!(out.status.code(), Some(1));
}
