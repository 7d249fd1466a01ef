use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use symspread_cli::{run, Command as Sub, CommandConfig};
use symspread_core::linset::LinsetContext;
use symspread_core::spread::desarguesian_spread_set;
use symspread_core::{CensusReport, Matrix};

fn symspread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symspread"))
        .args(args)
        .env_remove("SYMSPREAD_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_planes_matches_golden_report() {
    let out = symspread(&["classify-planes", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/classify_planes_q2.json"))
        .unwrap();
    assert_eq!(stdout(&out), golden);
    let r = CensusReport::from_json(&golden).unwrap();
    assert_eq!(
        [r.count("contained-conic"), r.count("contained-tangent"), r.count("contained-nucleus")],
        [7, 7, 1]
    );
}

#[test]
fn thread_count_never_changes_report_bytes() {
    let one = stdout(&symspread(&["classify-planes", "--order", "3", "--threads", "1"]));
    let eight = stdout(&symspread(&["classify-planes", "--order", "3", "--threads", "8"]));
    let env = Command::new(env!("CARGO_BIN_EXE_symspread"))
        .args(["classify-planes", "--order", "3"])
        .env("SYMSPREAD_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(one, eight);
    assert_eq!(one, stdout(&env));
}

#[test]
fn threads_flag_wins_over_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_symspread"))
        .args(["selftest", "--threads", "3", "--print-config"])
        .env("SYMSPREAD_THREADS", "5")
        .output()
        .unwrap();
    let cfg = CommandConfig::from_json(&stdout(&out)).unwrap();
    assert_eq!(cfg.threads, Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_symspread"))
        .args(["selftest", "--print-config"])
        .env("SYMSPREAD_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(CommandConfig::from_json(&stdout(&out)).unwrap().threads, Some(5));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(symspread(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(symspread(&["classify-planes", "--order", "7"]).status.code(), Some(2));
    assert_eq!(symspread(&["disjoint-planes", "--q", "4"]).status.code(), Some(2));
    assert_eq!(symspread(&["search-linsets", "--strategy", "sideways"]).status.code(), Some(2));
    assert_eq!(symspread(&["derive-fg"]).status.code(), Some(2));
    assert_eq!(symspread(&["derive-fg", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"a\": 1}").unwrap();
    let out = symspread(&["derive-fg", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed input"));
}

#[test]
fn selftest_passes() {
    let out = symspread(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let r = CensusReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.count("failed"), 0);
    assert!(r.count("passed") >= 8);
}

fn terms(s: &str) -> BTreeSet<BTreeSet<String>> {
    s.split(" + ").map(|t| t.split('*').map(str::to_string).collect()).collect()
}

#[test]
fn derive_fg_on_zero_spec_gives_the_bare_system() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"a":1,"forms":[[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0]]}"#)
        .unwrap();
    let out = symspread(&["derive-fg", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = CensusReport::from_json(&stdout(&out)).unwrap();
    assert!(r.checks_pass());
    // with l = m = n = 0 and a = 1: f = x1y1z1 + x1y2z2 + x2y1z2 + x2y2z1 + x2y2z2,
    // g = x1y1z2 + x1y2z1 + x2y1z1 + x1y2z2 + x2y1z2 + x2y2z1 (the x2y2z2 term has coefficient a^2 + 1 = 0)
    let f = terms("x1*y1*z1 + x1*y2*z2 + x2*y1*z2 + x2*y2*z1 + x2*y2*z2");
    let g = terms("x1*y1*z2 + x1*y2*z1 + x2*y1*z1 + x1*y2*z2 + x2*y1*z2 + x2*y2*z1");
    let w = &r.witnesses[0];
    assert_eq!(terms(w["f"].as_str().unwrap()), f);
    assert_eq!(terms(w["g"].as_str().unwrap()), g);
    assert_eq!(w["verdict"]["disjoint"], false);
}

#[test]
fn verify_spread_flags_counterexamples() {
    let ctx = LinsetContext::for_q(2).unwrap();
    let good = desarguesian_spread_set(&ctx.top, &ctx.ext).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spread.json");
    fs::write(&path, good.to_json()).unwrap();
    let out = symspread(&["verify-spread", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = CensusReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.checks["partition"], true);
    assert_eq!(r.checks["linear-set-is-plane"], true);
    assert_eq!(r.checks["semifield-nuclei"]["center"], 64);

    let mut bad = good.clone();
    bad.matrices[5] = Matrix::from_rows(&[[1, 0, 0], [0, 0, 0], [0, 0, 0]]).unwrap();
    fs::write(&path, bad.to_json()).unwrap();
    let out = symspread(&["verify-spread", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = CensusReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.checks["partition"], false);
    assert_eq!(r.checks["flags"]["spread"], false);
    assert_eq!(r.checks["spread-iff-partition"], true);
}

#[test]
fn search_writes_report_csv_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv, ck) = (dir.path().join("r.json"), dir.path().join("r.csv"), dir.path().join("ck.json"));
    let o = symspread(&[
        "search-linsets",
        "--strategy",
        "restricted-slice",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--timing",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).is_empty());
    let r = CensusReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.count("disjoint-plane"), 100);
    assert_eq!(r.params["slice"], "f1-canonical");
    assert!(r.elapsed_ms.is_some());
    assert_eq!(r.checkpoint.as_ref().unwrap()["complete"], true);
    assert!(ck.exists());
    let csv = fs::read_to_string(&csv).unwrap();
    assert!(csv.starts_with("tag,count\n"));
    assert!(csv.contains("disjoint-plane,100\n"));
}

#[test]
fn config_roundtrips_through_json() {
    let mut cfg = CommandConfig::new(Sub::SearchLinsets);
    cfg.threads = Some(4);
    cfg.seed = 17;
    cfg.checkpoint = Some("ck.json".into());
    let back = CommandConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert!(CommandConfig::from_json("{\"command\": \"nope\"}").is_err());
}

#[test]
fn run_returns_counterexample_status() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CommandConfig::new(Sub::OrbitCheck);
    cfg.pairs = 5;
    cfg.seed = 3;
    cfg.out = Some(dir.path().join("orbit.json"));
    let o = run(&cfg).unwrap();
    assert_eq!(o.exit_code(), 0);
    assert_eq!(o.report.count("success"), 5);
    assert_eq!(o.report.params["seed"], 3);
}
