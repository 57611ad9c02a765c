//! Runs every acceptance criterion and prints one line each.

use pccfl::acceptance::{run_criterion, DEFAULT_SEED};

fn criterion(id: usize) {
    let r = run_criterion(id, DEFAULT_SEED);
    println!("{}", r.line());
    assert!(r.passed(), "{}", r.line());
}

#[test]
fn criterion_01_example_1_fidelity() {
    criterion(1);
}

#[test]
fn criterion_02_example_2_fidelity() {
    criterion(2);
}

#[test]
fn criterion_03_trace_vs_word_semantics() {
    criterion(3);
}

#[test]
fn criterion_04_certificates() {
    criterion(4);
}

#[test]
fn criterion_05_closure_constructions() {
    criterion(5);
}

#[test]
fn criterion_06_mpda_correspondence() {
    criterion(6);
}

#[test]
fn criterion_07_pumping_positive() {
    criterion(7);
}

#[test]
fn criterion_08_pumping_negative() {
    criterion(8);
}

#[test]
fn criterion_09_trace_closure_witnesses() {
    criterion(9);
}

#[test]
fn criterion_10_pa_engine() {
    criterion(10);
}
