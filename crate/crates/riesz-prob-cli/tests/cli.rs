//! End-to-end tests of the binary: exit codes, report files, determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riesz-prob"))
}

fn write_input(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn canonical_input(dir: &tempfile::TempDir) -> PathBuf {
    write_input(
        dir,
        "canonical.json",
        r#"{
            "triple": {"dim": 4, "weights": [0.25, 0.25, 0.25, 0.25], "partition": [[0, 1], [2, 3]]},
            "element": [0, 1, 1, 2]
        }"#,
    )
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn genfun_table_has_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = canonical_input(&dir);
    let out = dir.path().join("genfun.csv");
    let result = run(bin()
        .args(["genfun", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .args(["--s-grid", "0,0.5,1"]));
    assert!(result.status.success(), "{result:?}");
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,block,value"));
    // g(0.5) = (0.75, 0.375) per block
    assert!(csv.contains("5.0000000000000000e-1,0,7.5000000000000000e-1"));
    assert!(csv.contains("5.0000000000000000e-1,1,3.7500000000000000e-1"));
}

#[test]
fn chernoff_table_has_nonnegative_slack() {
    let dir = tempfile::tempdir().unwrap();
    let input = canonical_input(&dir);
    let out = dir.path().join("chernoff.csv");
    let result = run(bin()
        .args(["chernoff-table", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .args(["--s-grid", "0.5,2,4"]));
    assert!(result.status.success(), "{result:?}");
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("alpha,s,block,lhs,rhs,slack"));
    for line in csv.lines().skip(1) {
        let slack: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(slack >= -1e-12, "negative slack row: {line}");
    }
}

#[test]
fn poisson_approx_errors_shrink_with_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pa.csv");
    let result = run(bin()
        .args(["poisson-approx", "--g", "1.0", "--n", "10,100", "--kmax", "10"])
        .arg("--out")
        .arg(&out));
    assert!(result.status.success(), "{result:?}");
    let csv = fs::read_to_string(&out).unwrap();
    let max_err = |n: &str| {
        csv.lines()
            .skip(1)
            .filter(|l| l.starts_with(&format!("{n},")))
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .fold(0.0f64, f64::max)
    };
    assert!(max_err("100") < max_err("10"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let result = run(bin()
            .args(["poisson-approx", "--g", "0.5", "--n", "10,50", "--kmax", "8", "--seed", "9"])
            .arg("--out")
            .arg(out));
        assert!(result.status.success());
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn malformed_partition_exits_2_with_error_code() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(
        &dir,
        "bad.json",
        r#"{"triple": {"dim": 2, "weights": [1.0, 1.0], "partition": [[0, 0]]}, "element": [0, 1]}"#,
    );
    let result = run(bin().args(["genfun", "--input"]).arg(&input));
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    let err: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "bad_partition");
}

#[test]
fn missing_input_exits_2() {
    let result = run(bin().args(["genfun"]));
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("missing_input"));
}

#[test]
fn compound_verifies_and_reports_lifts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(
        &dir,
        "compound.json",
        r#"{
            "triple": {"dim": 1, "weights": [1.0], "partition": [[0]]},
            "index": {"kind": "finite", "coeffs": [[0.2], [0.3], [0.3], [0.2]]},
            "summand": {"kind": "finite", "coeffs": [[0.6], [0.4]]},
            "count": 3
        }"#,
    );
    let out = dir.path().join("compound.csv");
    let result = run(bin()
        .args(["compound", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .args(["--tol", "1e-10"]));
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8(result.stdout).unwrap();
    let summary: serde_json::Value = serde_json::from_str(stdout.lines().last().unwrap()).unwrap();
    assert_eq!(summary["independence"], true);
    assert!(summary["lifts"]["base_to_full"].is_array());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("k,block,mass_composed,mass_realized,abs_err"));
}

#[test]
fn genfun_mass_table_is_wide_format() {
    let dir = tempfile::tempdir().unwrap();
    let input = canonical_input(&dir);
    let result = run(bin().args(["genfun", "--input"]).arg(&input).arg("--masses"));
    assert!(result.status.success());
    let stdout = String::from_utf8(result.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("k,block_0,block_1"));
    assert_eq!(
        lines.next(),
        Some("0,5.0000000000000000e-1,0.0000000000000000e0")
    );
}

#[test]
fn parametric_thinning_check() {
    let result = run(bin().args(["compound", "--g", "1.5", "--p", "0.4"]));
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8(result.stdout).unwrap();
    let summary: serde_json::Value = serde_json::from_str(stdout.lines().last().unwrap()).unwrap();
    assert_eq!(summary["ok"], true);
}

#[test]
fn oversized_element_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(
        &dir,
        "huge.json",
        r#"{"triple": {"dim": 1, "weights": [1.0], "partition": [[0]]}, "element": [4000000000]}"#,
    );
    let result = run(bin().args(["genfun", "--input"]).arg(&input));
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("bad_element"));
}

#[test]
fn nonpositive_tolerance_exits_2() {
    let result = run(bin().args(["verify", "--tol=-1"]));
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("bad_tolerance"));
}

#[test]
fn independence_check_detects_dependence() {
    let dir = tempfile::tempdir().unwrap();
    // same element twice on a 1-block space: dependent
    let input = write_input(
        &dir,
        "dep.json",
        r#"{
            "triple": {"dim": 4, "weights": [0.25, 0.25, 0.25, 0.25], "partition": [[0, 1, 2, 3]]},
            "elements": [[1, 1, 0, 0], [1, 1, 0, 0]]
        }"#,
    );
    let result = run(bin().args(["independence-check", "--input"]).arg(&input));
    assert_eq!(result.status.code(), Some(1));

    // product-structured events: independent
    let input = write_input(
        &dir,
        "indep.json",
        r#"{
            "triple": {"dim": 4, "weights": [0.25, 0.25, 0.25, 0.25], "partition": [[0, 1, 2, 3]]},
            "projections": [[1, 1, 0, 0], [1, 0, 1, 0]]
        }"#,
    );
    let result = run(bin().args(["independence-check", "--input"]).arg(&input));
    assert!(result.status.success(), "{result:?}");
}

#[test]
fn verify_passes_on_reduced_suite() {
    // full acceptance criteria plus a reduced randomized suite
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.csv");
    let result = run(bin()
        .args(["verify", "--instances", "40"])
        .arg("--out")
        .arg(&out));
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8(result.stdout).unwrap();
    for id in 1..=10 {
        assert!(
            stdout.contains(&format!("criterion {id:2} (")),
            "missing line for criterion {id}: {stdout}"
        );
    }
    assert_eq!(stdout.matches(": PASS").count(), 11); // 10 criteria + suite
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 12); // header + 10 criteria + suite row
}
