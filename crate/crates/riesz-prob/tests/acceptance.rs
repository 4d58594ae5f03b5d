//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. The same criteria run end-to-end through `riesz-prob verify`.

use riesz_prob::verify::{self, AcceptanceConfig, CriterionReport};

fn check(report: riesz_prob::Result<CriterionReport>) {
    let report = report.expect("criterion must run to completion");
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

fn cfg() -> AcceptanceConfig {
    AcceptanceConfig::default()
}

#[test]
fn criterion_01_closed_form_generating_functions() {
    check(verify::criterion_1(&cfg()));
}

#[test]
fn criterion_02_power_evaluation_identity() {
    check(verify::criterion_2(&cfg()));
}

#[test]
fn criterion_03_product_rule_for_independent_sums() {
    check(verify::criterion_3(&cfg()));
}

#[test]
fn criterion_04_compound_sum_identities() {
    check(verify::criterion_4(&cfg()));
}

#[test]
fn criterion_05_tail_bound_sweeps() {
    check(verify::criterion_5(&cfg()));
}

#[test]
fn criterion_06_factorial_moments_and_left_derivative() {
    check(verify::criterion_6(&cfg()));
}

#[test]
fn criterion_07_poisson_approximation_rate() {
    check(verify::criterion_7(&cfg()));
}

#[test]
fn criterion_08_compound_poisson_thinning() {
    check(verify::criterion_8(&cfg()));
}

#[test]
fn criterion_09_distribution_convergence_equivalence() {
    check(verify::criterion_9(&cfg()));
}

#[test]
fn criterion_10_oracle_equivalence_suite() {
    check(verify::criterion_10(&cfg()));
}
