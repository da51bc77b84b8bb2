//! Release gate: one test per criterion, each printing a single pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria as well.

use curvlab_cli::criteria::{run_one, CriterionStatus};

fn check(index: usize) {
    let outcome = run_one(index, 0, 100_000);
    let line = format!(
        "criterion {:>2} ({}): {} — {}",
        outcome.index,
        outcome.name,
        match outcome.status {
            CriterionStatus::Pass => "pass",
            CriterionStatus::Fail => "fail",
            CriterionStatus::Skipped => "skipped",
        },
        outcome.details
    );
    println!("{line}");
    assert!(outcome.status == CriterionStatus::Pass, "{line}");
}

#[test]
fn criterion_01_identity_suites() {
    check(1);
}

#[test]
fn criterion_02_seven_dim_example_spectra() {
    check(2);
}

#[test]
fn criterion_03_six_dim_example_spectra() {
    check(3);
}

#[test]
fn criterion_04_einstein_fits() {
    check(4);
}

#[test]
fn criterion_05_sectional_witnesses_and_sampling() {
    check(5);
}

#[test]
fn criterion_06_bound_containment() {
    check(6);
}

#[test]
fn criterion_07_weyl_shift_minima() {
    check(7);
}

#[test]
fn criterion_08_betti_verdicts() {
    check(8);
}

#[test]
fn criterion_09_weyl_term_identities() {
    check(9);
}

#[test]
fn criterion_10_algebraic_property_suite() {
    check(10);
}

#[test]
fn criterion_11_weitzenboeck_constants() {
    check(11);
}
