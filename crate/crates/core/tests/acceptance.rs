//! Acceptance suite: one test per reproduction criterion, each printing its
//! pass/fail line (visible with `--nocapture`).

use tlf_core::verification::{self, CheckOutcome};

fn assert_criterion(outcome: CheckOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_truncated_cauchy_variance() {
    assert_criterion(verification::check_variance_truncated_cauchy());
}

#[test]
fn criterion_02_fourfold_ratio() {
    assert_criterion(verification::check_fourfold_ratio());
}

#[test]
fn criterion_03_threefold_ratio() {
    assert_criterion(verification::check_threefold_ratio());
}

#[test]
fn criterion_04_autocorrelation_structure() {
    assert_criterion(verification::check_autocorrelation_structure());
}

#[test]
fn criterion_05_joint_cumulant_law() {
    assert_criterion(verification::check_joint_cumulant_law());
}

#[test]
fn criterion_06_clt_convergence_scan() {
    assert_criterion(verification::check_clt_convergence());
}

#[test]
fn criterion_07_return_probability() {
    assert_criterion(verification::check_return_probability());
}

#[test]
fn criterion_08_isoline_geometry() {
    assert_criterion(verification::check_isoline_geometry());
}

#[test]
fn criterion_09_acceptance_rate_vs_tail_mass() {
    assert_criterion(verification::check_acceptance_vs_tail_mass());
}

#[test]
fn criterion_10_algebraic_suites() {
    assert_criterion(verification::check_algebraic_suites());
}
