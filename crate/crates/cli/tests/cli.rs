use std::path::PathBuf;
use std::process::Command;

use ascover::commands::{sweep, sweep_csv, SWEEP_HEADER};
use ascover::spec::load_function;
use ascover_core::ff::Budget;
use ascover_core::nt::{q, Q};
use num_traits::Zero;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn ascover(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ascover")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = ascover(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn pair(v: &Value) -> Q {
    q(v[0].as_i64().unwrap(), v[1].as_i64().unwrap())
}

#[test]
fn sweep_matches_golden_and_oracle() {
    let f = load_function(&std::fs::read_to_string(data("data/x3_plus_x.txt")).unwrap()).unwrap();
    let rows = sweep(&f, 5, 37, 1, &Budget::default()).unwrap();
    let golden = std::fs::read_to_string(data("golden/sweep_x3_plus_x.csv")).unwrap();
    assert_eq!(sweep_csv(&rows, false), golden);

    // gap at the middle vertex: NP_1 = (p+1)/(3(p-1)) for p = 2 mod 3
    let primes: Vec<u64> = rows.iter().map(|r| r.p).collect();
    assert_eq!(primes, [5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    for r in &rows {
        if r.p % 3 == 1 {
            assert!(r.coincide && r.max_gap.is_zero(), "p = {}", r.p);
        } else {
            assert!(!r.coincide);
            assert_eq!(r.max_gap, q(2, 3 * (r.p as i64 - 1)), "p = {}", r.p);
        }
        assert!(r.max_gap <= q(2, r.p as i64 - 1));
        assert!(r.seconds >= 0.0);
    }
}

#[test]
fn sweep_csv_from_the_binary() {
    let spec = data("data/x3_plus_x.txt");
    let (code, out, _) = ascover(&["sweep", "--spec", spec.to_str().unwrap(), "--primes", "5..13", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(SWEEP_HEADER));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..7], ["5", "1", "false", "1", "6", "0", "0:0 2:1"]);
    assert_eq!(out.lines().count(), 5);

    let (code, out, _) = ascover(&["sweep", "--spec", spec.to_str().unwrap(), "--primes", "5..13", "--format", "svg"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("<svg"));
    assert_eq!(out.matches("<polyline").count(), 5);
}

#[test]
fn hodge_json_is_stable() {
    let (code, out, _) = ascover(&["hodge", "--orders", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(out, std::fs::read_to_string(data("golden/hodge_2_1.json")).unwrap());
    let v = json(&["hodge", "--ell", "1", "--orders", "3"]);
    let ys: Vec<Q> = v["vertices"].as_array().unwrap().iter().map(|p| pair(&p["y"])).collect();
    assert_eq!(ys, [q(0, 1), q(1, 3), q(1, 1)]);
    let v = json(&["hodge", "--ell", "2", "--orders", "1,1"]);
    let ys: Vec<Q> = v["vertices"].as_array().unwrap().iter().map(|p| pair(&p["y"])).collect();
    assert_eq!(ys, [q(0, 1), q(0, 1), q(1, 1)]);
}

#[test]
fn lfun_and_zeta_for_x_squared() {
    let spec = data("data/x2.txt");
    let spec = spec.to_str().unwrap();
    let v = json(&["lfun", "--spec", spec, "--prime", "3"]);
    assert_eq!(v["coefficients"][1], serde_json::json!([1, 2]));
    assert_eq!(v["np"][1]["y"], serde_json::json!([1, 2]));

    let v = json(&["zeta", "--spec", spec, "--prime", "3"]);
    assert_eq!(v["numerator"], serde_json::json!([1, 0, 3]));
    assert_eq!(v["comparison"]["coincide"], Value::Bool(true));
    assert_eq!(v["comparison"]["lies_above"], Value::Bool(true));

    let v = json(&["zeta", "--inline", "orders = 1,1; coeff 1 1 = 1; coeff 2 1 = 2", "--prime", "5"]);
    assert_eq!(pair(&v["comparison"]["ds0_len"]), q(1, 1));
    assert_eq!(v["comparison"]["lies_above"], Value::Bool(true));
}

#[test]
fn exit_codes() {
    let x2 = data("data/x2.txt");
    let x2 = x2.to_str().unwrap();
    assert_eq!(ascover(&["hodge", "--orders", "0"]).0, 2);
    assert_eq!(ascover(&["hodge", "--orders", "a"]).0, 2);
    assert_eq!(ascover(&["lfun", "--spec", "/nonexistent", "--prime", "3"]).0, 2);
    assert_eq!(ascover(&["lfun", "--inline", "orders = 2", "--prime", "3"]).0, 2);
    let (code, _, err) = ascover(&["lfun", "--spec", x2, "--prime", "2"]);
    assert_eq!(code, 3);
    assert!(err.contains("bad prime"));
    assert_eq!(ascover(&["lfun", "--spec", x2, "--prime", "9"]).0, 3);
    assert_eq!(ascover(&["lfun", "--spec", x2, "--prime", "3", "--a", "3", "--budget", "10"]).0, 4);
    assert_eq!(ascover(&["verify", "no-such-suite"]).0, 2);
    assert_eq!(ascover(&["frobnicate"]).0, 2);
    assert_eq!(ascover(&["hodge", "--orders", "3", "--format", "csv"]).0, 2);
}

#[test]
fn verify_and_dwork() {
    let v = json(&["verify", "block-lemma"]);
    assert_eq!(v["suites"][0]["passed"], 200);
    assert_eq!(v["ok"], Value::Bool(true));

    let spec = data("data/x3_plus_x.txt");
    let v = json(&["dwork", "--spec", spec.to_str().unwrap(), "--prime", "5", "--size", "12", "--precision", "5"]);
    assert_eq!(v["matches_direct"], Value::Bool(true));
    assert_eq!(v["trace_formula"]["holds"], Value::Bool(true));
    assert_eq!(v["np"], v["direct_np"]);
}

#[test]
fn selftest_passes() {
    let v = json(&["selftest"]);
    assert_eq!(v["ok"], Value::Bool(true), "{v}");
}

#[test]
fn experiment_writes_reproducible_reports() {
    let base = std::env::temp_dir().join(format!("ascover-exp-{}", std::process::id()));
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let dir = base.join(run);
        let v = json(&["experiment", "--orders", "3", "--primes", "5..7", "--samples", "3", "--seed", "4", "--out", dir.to_str().unwrap()]);
        assert_eq!(v["primes"], serde_json::json!([5, 7]));
        for f in ["convergence.md", "convergence.csv", "probe.md"] {
            assert!(dir.join(f).exists());
        }
        csvs.push(std::fs::read_to_string(dir.join("convergence.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert!(csvs[0].starts_with("p,sample,k,np_num,np_den,c0_num,c0_den,upper_num,upper_den,within,attained"));
    let _ = std::fs::remove_dir_all(base);
    assert_eq!(ascover(&["experiment", "--orders", "3", "--primes", "5..7"]).0, 2);
}
