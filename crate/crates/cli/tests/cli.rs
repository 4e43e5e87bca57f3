//! End-to-end checks of the binary: exit codes, reproducibility of output
//! files, and the documented shapes of CSV and transcript outputs.

use std::path::Path;
use std::process::{Command, Output};

fn otns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otns"))
        .args(args)
        .env_remove("OTNS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let out = otns(&["--help"]);
    assert!(out.status.success());
    for sub in ["simulate", "optimize", "bound", "tradeoff", "verify"] {
        let sub_help = otns(&[sub, "--help"]);
        assert!(sub_help.status.success(), "{sub} --help failed");
    }
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(otns(&["bogus"]).status.code(), Some(1));
    assert_eq!(otns(&["simulate", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(otns(&["optimize"]).status.code(), Some(1), "needs --r or --sweep");
    assert_eq!(otns(&["simulate", "--n", "4"]).status.code(), Some(1), "n below minimum");
}

#[test]
fn simulate_transcripts_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let args = |out: String| {
        vec![
            "simulate".into(),
            "--mode".into(),
            "perfect".to_string(),
            "--n".into(),
            "64".into(),
            "--ell".into(),
            "8".into(),
            "--seed".into(),
            "7".into(),
            "--bob".into(),
            "honest:+".into(),
            "--out".into(),
            out,
        ]
    };
    let a = otns(&args(path("a.json")).iter().map(String::as_str).collect::<Vec<_>>());
    let b = otns(&args(path("b.json")).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(a.status.success() && b.status.success());
    assert!(stdout(&a).contains("CORRECT"));
    let file_a = std::fs::read(dir.path().join("a.json")).unwrap();
    let file_b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(file_a, file_b, "same config and seed must give identical transcripts");
    assert!(!file_a.is_empty());
}

#[test]
fn simulate_erase_all_aborts_with_exit_code() {
    let out = otns(&[
        "simulate", "--n", "64", "--ell", "8", "--bob", "erase-all", "--fail-on-abort",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("ABORTED"));

    // Without the flag an abort is an ordinary outcome.
    let out = otns(&["simulate", "--n", "64", "--ell", "8", "--bob", "erase-all"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn simulate_batch_is_ordered_and_counted() {
    let out = otns(&[
        "simulate", "--mode", "perfect", "--n", "32", "--ell", "4", "--seed", "3", "--runs", "8",
        "--workers", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut last = None;
    for line in text.lines().filter(|l| l.starts_with("run ")) {
        let idx: u64 = line.split_whitespace().nth(1).unwrap().trim_end_matches(':').parse().unwrap();
        if let Some(prev) = last {
            assert!(idx > prev, "run lines out of order: {text}");
        }
        last = Some(idx);
    }
    assert_eq!(last, Some(7));
    assert!(text.contains("summary: 8/8 correct"));
}

#[test]
fn optimize_sweep_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = otns(&[
        "optimize", "--sweep", "0:1:0.05", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 22, "header plus 21 grid rows");
    assert_eq!(rows[0], "r,delta_max,regime,alpha");
    assert!(rows[1].starts_with("0,0.85355"), "{}", rows[1]);
    assert!(rows[21].starts_with("1,1"), "{}", rows[21]);
}

#[test]
fn tradeoff_has_secure_region() {
    let out = otns(&["tradeoff", "--r", "0:1:0.02", "--a", "1:2:0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("r,a,value,secure"));
    assert!(text.lines().any(|l| l.ends_with(",1")), "no secure grid point");
}

#[test]
fn bound_reports_json() {
    let out = otns(&[
        "bound", "--mode", "practical", "--ell", "50", "--n", "2000", "--r", "0.5", "--p-error",
        "0.01", "--accounting", "concrete:300",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("delta_sec_bound"));
    assert!(text.contains("k_bits"), "accounting mode must be stated: {text}");
}

#[test]
fn verify_subset_and_exit_codes() {
    let out = otns(&["verify", "--suite", "breidbart-constant,error-threshold"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS breidbart-constant"));
    assert!(text.contains("2 passed, 0 failed"));

    assert_eq!(otns(&["verify", "--suite", "no-such-check"]).status.code(), Some(1));
}

#[test]
fn out_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_otns"))
        .args([
            "simulate", "--mode", "perfect", "--n", "32", "--ell", "4", "--seed", "1", "--out",
            "t.json",
        ])
        .env("OTNS_OUT_DIR", dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(Path::new(&dir.path().join("t.json")).exists());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "mode = perfect\nn = 32\nell = 4\nseed = 5\n").unwrap();
    let a = otns(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success());
    assert!(stdout(&a).contains("seed=5"));
    let b = otns(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert!(b.status.success());
    assert!(stdout(&b).contains("seed=9"), "flag must override config");
}
