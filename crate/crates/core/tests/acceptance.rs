//! Acceptance criteria, one test per criterion. Each prints one PASS/FAIL
//! line per checked quantity.

use gis_spectra::verify::{run_suite, Suite, SuiteOptions};

fn check(number: u32, suite: Suite) {
    let report = run_suite(suite, &SuiteOptions::default());
    let mut failed = Vec::new();
    for c in &report.criteria {
        println!("criterion {number} ({}): {}", report.suite, c.line());
        if !c.passed {
            failed.push(c.name.clone());
        }
    }
    println!(
        "criterion {number} ({}) finished in {:.2} s",
        report.suite, report.elapsed_seconds
    );
    assert!(failed.is_empty(), "criterion {number} failed: {failed:?}");
}

#[test]
fn criterion_01_explicit_models() {
    check(1, Suite::Explicit);
}

#[test]
fn criterion_02_point_mass() {
    check(2, Suite::PointMass);
}

#[test]
fn criterion_03_step_eigenvalue() {
    check(3, Suite::StepEigenvalue);
}

#[test]
fn criterion_04_trace_formulas() {
    check(4, Suite::Trace);
}

#[test]
fn criterion_05_unimodularity_and_symmetry() {
    check(5, Suite::Unimodular);
}

#[test]
fn criterion_06_jets() {
    check(6, Suite::Jets);
}

#[test]
fn criterion_07_bounds() {
    check(7, Suite::Bounds);
}

#[test]
fn criterion_08_jensen() {
    check(8, Suite::Jensen);
}

#[test]
fn criterion_09_camassa_holm() {
    check(9, Suite::CamassaHolm);
}

#[test]
fn criterion_10_delta_prime() {
    check(10, Suite::DeltaPrime);
}

#[test]
fn criterion_11_numerics() {
    check(11, Suite::Numerics);
}
