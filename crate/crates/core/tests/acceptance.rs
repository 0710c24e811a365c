//! Acceptance suite: every quantitative benchmark, one test per criterion.
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! pass/fail table.

use lightmatter::acceptance::run_criterion;

fn check(id: &str) {
    let outcome = run_criterion(id);
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_1_spin_squeezing() {
    check("squeezing");
}

#[test]
fn criterion_2_squeezing_bound() {
    check("squeezing-bound");
}

#[test]
fn criterion_3_entanglement() {
    check("entanglement");
}

#[test]
fn criterion_4_memory() {
    check("memory");
}

#[test]
fn criterion_5_teleportation() {
    check("teleportation");
}

#[test]
fn criterion_6_maxwell_bloch() {
    check("maxwell-bloch");
}

#[test]
fn criterion_7_atomic_structure() {
    check("atomic-structure");
}

#[test]
fn criterion_8_dlcz() {
    check("dlcz");
}

#[test]
fn criterion_9_physicality_fuzz() {
    check("physicality-fuzz");
}
