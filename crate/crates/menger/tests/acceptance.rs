//! Acceptance suite: the ten numbered verification claims, each with its
//! pinned tolerance and a single pass/fail line on stdout.
//!
//! Run with `cargo test --test acceptance` (the whole suite is part of
//! `cargo test --workspace`). Claims 1-5 and 7-10 use the default budget;
//! claim 6 uses the low-budget preset here to keep the suite fast, with
//! the correspondingly relaxed 10% error tolerance.

use menger::report::ClaimRecord;
use menger::verify::{run_claim, Budget};

fn check(index: usize, budget: Budget, label: &str) {
    let records: Vec<ClaimRecord> = run_claim(index, budget);
    assert!(!records.is_empty(), "claim {index} produced no records");
    let pass = records.iter().all(|r| r.pass);
    let worst = records.iter().find(|r| !r.pass);
    println!(
        "acceptance {index:2} [{}] {label}: {}",
        if pass { "PASS" } else { "FAIL" },
        records
            .iter()
            .map(|r| format!("{}={:.6e}", r.id, r.computed))
            .collect::<Vec<_>>()
            .join(", ")
    );
    assert!(pass, "claim {index} failed: {worst:?}");
}

#[test]
fn acceptance_01_circumradius_forms_agree() {
    check(
        1,
        Budget::Default,
        "three circumradius forms agree to 1e-12 on 10^4 random triples",
    );
}

#[test]
fn acceptance_02_reference_integrals() {
    check(
        2,
        Budget::Default,
        "closed-form integral matches quadrature to 1e-10; p-weighted \
         integrals respect their upper bounds",
    );
}

#[test]
fn acceptance_03_line_distance_bound() {
    check(
        3,
        Budget::Default,
        "line-origin distance lower bound holds on 10^5 random pairs",
    );
}

#[test]
fn acceptance_04_u_energy_bounds() {
    check(
        4,
        Budget::Default,
        "U_p of the three-arm set within 1% of its exact value and below \
         6/(1-p), p in {0.25, 0.5, 0.75}",
    );
}

#[test]
fn acceptance_05_i_energy_bounds() {
    check(
        5,
        Budget::Default,
        "I_p of the three-arm set below its closed bound with 2% error, \
         p in {1.25, 1.5, 1.75}",
    );
}

#[test]
fn acceptance_06_m_energy_and_triple_functional() {
    check(
        6,
        Budget::Low,
        "M_2 below 72 pi, equal to 18 x triple functional, F_2 below 4 pi \
         (low budget, 10% tolerance)",
    );
}

#[test]
fn acceptance_07_ball_ladders() {
    check(
        7,
        Budget::Default,
        "localized energies plateau at the critical exponent and decay \
         at least 10x below it on dyadic ball ladders",
    );
}

#[test]
fn acceptance_08_block_series() {
    check(
        8,
        Budget::Default,
        "exact separation, exponent and partial-sum checks for the \
         dyadic-block set, n_max = 4",
    );
}

#[test]
fn acceptance_09_tangent_classification() {
    check(
        9,
        Budget::Default,
        "strong/weak/no-tangent verdicts on the built-in sets, including \
         the exact alternating weak tangent of the block set",
    );
}

#[test]
fn acceptance_10_chain_interpolation_symmetry() {
    check(
        10,
        Budget::Default,
        "energy chain, exponent interpolation, permutation invariance and \
         27-triple decomposition",
    );
}
