//! Release acceptance suite: one test per criterion, each printing its
//! pass/fail line (visible with `--nocapture`).

use tocone::acceptance::{self, AcceptanceConfig};

fn run(f: fn(AcceptanceConfig) -> acceptance::CriterionResult) {
    let r = f(AcceptanceConfig::default());
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn c01_analytic_vs_oracle() {
    run(acceptance::criterion_1);
}

#[test]
fn c02_pointb_closed_forms() {
    run(acceptance::criterion_2);
}

#[test]
fn c03_channel_synthesis() {
    run(acceptance::criterion_3);
}

#[test]
fn c04_dual_path_equivalence() {
    run(acceptance::criterion_4);
}

#[test]
fn c05_optimal_pointb_unitary() {
    run(acceptance::criterion_5);
}

#[test]
fn c06_svd_normal_form() {
    run(acceptance::criterion_6);
}

#[test]
fn c07_forced_sigma_pattern() {
    run(acceptance::criterion_7);
}

#[test]
fn c08_gap_bounds() {
    run(acceptance::criterion_8);
}

#[test]
fn c09_reachability_oracles() {
    run(acceptance::criterion_9);
}

#[test]
fn c10_cone_figure() {
    run(acceptance::criterion_10);
}
