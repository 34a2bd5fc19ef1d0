//! End-to-end checks of the `srlab` binary: flags, exit codes, seeding,
//! and file output.

use std::process::{Command, Output};

fn srlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args(args)
        .env_remove("SR_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn bias_table_stdout() {
    let out = srlab(&["bias-table", "--n", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# srlab"));
    assert_eq!(text.lines().count(), 20);
    assert!(text.contains("\n9,"));
}

#[test]
fn config_errors_exit_one() {
    // unknown flag
    let out = srlab(&["bias-table", "--n", "20", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    // malformed grid
    let out = srlab(&[
        "horner-x-sweep",
        "--poly",
        "chebyshev:4",
        "--x-grid",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // odd degree
    let out = srlab(&["horner-x-sweep", "--poly", "chebyshev:7"]);
    assert_eq!(out.status.code(), Some(1));
    // bad lambda
    let out = srlab(&["horner-x-sweep", "--poly", "chebyshev:4", "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_all_passes_and_exits_zero() {
    let out = srlab(&["verify", "--trials", "5000", "--seed", "7"]);
    assert!(out.status.success(), "verify failed: {out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    for suite in [
        "lemma1",
        "expectation",
        "theta-constancy",
        "remark",
        "unbiasedness",
    ] {
        assert!(text.contains(&format!("suite {suite}: PASS")), "{text}");
    }
    assert!(text.contains("5 suites, 0 failed"));
}

#[test]
fn injected_bug_flips_verify_to_failure() {
    let out = srlab(&[
        "verify",
        "--suite",
        "unbiasedness",
        "--inject-bias-bug",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("suite unbiasedness: FAIL"));
}

#[test]
fn seed_env_var_is_honored_and_flag_wins() {
    let base = Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args([
            "integrate",
            "--n-list",
            "20",
            "--samples",
            "5",
            "--seed",
            "123",
        ])
        .output()
        .unwrap();
    let via_env = Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args(["integrate", "--n-list", "20", "--samples", "5"])
        .env("SR_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(base.stdout, via_env.stdout);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args([
            "integrate",
            "--n-list",
            "20",
            "--samples",
            "5",
            "--seed",
            "123",
        ])
        .env("SR_SEED", "999")
        .output()
        .unwrap();
    assert_eq!(base.stdout, flag_wins.stdout);
    let different = Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args([
            "integrate",
            "--n-list",
            "20",
            "--samples",
            "5",
            "--seed",
            "124",
        ])
        .output()
        .unwrap();
    assert_ne!(base.stdout, different.stdout);
}

#[test]
fn output_file_and_svg() {
    let dir = std::env::temp_dir().join(format!("srlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("sweep.csv");
    let out = srlab(&[
        "horner-n-sweep",
        "--n-list",
        "2,4,8",
        "--samples",
        "6",
        "--output",
        csv_path.to_str().unwrap(),
        "--emit-svg",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("# srlab"));
    assert!(csv.contains("degree,horner_n,cond1"));
    let svg = std::fs::read_to_string(csv_path.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn toy_format_flag() {
    let out = srlab(&["bias-table", "--n", "20", "--format", "toy:8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p8e[-16,15]"));
}

#[test]
fn range_failures_exit_three() {
    // 1/N underflows a narrow toy exponent range
    let out = srlab(&["bias-table", "--n", "1000000", "--format", "toy:8"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}
