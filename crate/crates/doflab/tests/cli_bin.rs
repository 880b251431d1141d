//! End-to-end tests of the `doflab` binary: exit codes, CSV output,
//! determinism, thread capping.

use std::process::{Command, Output};

fn doflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doflab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn bounds_prints_csv_and_exits_zero() {
    let out = doflab(&[
        "bounds",
        "--topology",
        "x",
        "--sources",
        "3",
        "--destinations",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,exact,decimal,pass\n"));
    assert!(text.contains("max_sum_dof,2,2.0,true"));
    assert!(text.contains("inequalities,12,12.0,true"));
}

#[test]
fn unknown_flags_exit_two_with_usage() {
    let out = doflab(&["bounds", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.to_lowercase().contains("usage") || err.contains("--bogus"));
}

#[test]
fn failed_checks_exit_one() {
    // A slope fit over a low-SNR window misses the DoF target: the run
    // completes, reports pass=false, and exits 1.
    let out = doflab(&[
        "slope",
        "--k",
        "3",
        "--n",
        "1",
        "--snr-min",
        "0",
        "--snr-max",
        "15",
        "--step",
        "5",
        "--trials",
        "2",
        "--seed",
        "1",
        "--fit-min-db",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("slope,"));
    assert!(text.trim_end().ends_with("false"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "align", "--k", "3", "--n", "1", "--seed", "7", "--trials", "4",
    ];
    let a = doflab(&args);
    let b = doflab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "align", "--k", "3", "--n", "2", "--seed", "3", "--trials", "4",
    ];
    let free = doflab(&args);
    let capped = Command::new(env!("CARGO_BIN_EXE_doflab"))
        .args(args)
        .env("DOFLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(free.status.code(), Some(0));
    assert_eq!(capped.status.code(), Some(0));
    assert_eq!(free.stdout, capped.stdout);
}

#[test]
fn slope_example_matches_the_formula() {
    let out = doflab(&[
        "slope",
        "--k",
        "3",
        "--n",
        "3",
        "--snr-min",
        "40",
        "--snr-max",
        "70",
        "--step",
        "10",
        "--trials",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let summary = text.lines().last().unwrap();
    let slope: f64 = summary.split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope - 1.08).abs() <= 0.05 * 1.08, "slope {slope}");
}

#[test]
fn feedback_demo_summary_rows() {
    let out = doflab(&["feedback-demo", "--trials", "5", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("slope,total,"));
    assert!(text.contains("slope,w_1_3,"));
    assert!(text.contains("slope,baseline_total,"));
}

#[test]
fn replay_all_pass() {
    let out = doflab(&[
        "replay",
        "--trials",
        "5",
        "--block-len",
        "12",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("seed,n,max_deviation,pass\n"));
    assert!(text.trim_end().ends_with("true"));
}
