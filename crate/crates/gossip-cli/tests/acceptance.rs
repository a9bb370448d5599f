//! The acceptance gate: one test per verification criterion, each printing a
//! pass/fail line (visible with `--nocapture`, or in the failure report).
//! Criteria 1–9 run in-process at full scale; criterion 10 shells out to the
//! `gossip verify` binary twice and demands byte-identical artifacts.

use std::path::Path;
use std::process::Command;

use gossip_core::experiments::{run_criterion, Scale};

fn check(id: u32) {
    let rep = run_criterion(id, Scale::Full).expect("criterion runner");
    println!(
        "criterion {:02} [{}] {}: {}",
        rep.id,
        if rep.passed { "PASS" } else { "FAIL" },
        rep.name,
        rep.detail
    );
    assert!(rep.passed, "criterion {:02} ({}) failed: {}", rep.id, rep.name, rep.detail);
}

#[test]
fn criterion_01_exact_conductance_equals_its_dual() {
    check(1);
}

#[test]
fn criterion_02_conductance_sandwich_is_strict() {
    check(2);
}

#[test]
fn criterion_03_ring_regularity_and_halving_cut() {
    check(3);
}

#[test]
fn criterion_04_guessing_round_scalings() {
    check(4);
}

#[test]
fn criterion_05_pushpull_median_bound() {
    check(5);
}

#[test]
fn criterion_06_spanner_stretch_and_degree() {
    check(6);
}

#[test]
fn criterion_07_phase_runner_coverage_budgets() {
    check(7);
}

#[test]
fn criterion_08_simultaneous_termination() {
    check(8);
}

#[test]
fn criterion_09_strategy_crossover() {
    check(9);
}

#[test]
fn criterion_10_verify_artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let run = |out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_gossip"))
            .args(["verify", "--scale", "smoke", "--out-dir"])
            .arg(out)
            .output()
            .expect("spawn gossip verify")
    };
    let first = run(&a);
    let second = run(&b);
    assert_eq!(first.status.code(), second.status.code(), "exit codes agree");
    assert_eq!(first.stdout, second.stdout, "stdout reports agree");

    let names = |d: &Path| -> Vec<String> {
        let mut v: Vec<String> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    let (na, nb) = (names(&a), names(&b));
    assert_eq!(na, nb, "artifact sets agree");
    assert!(na.contains(&"summary.json".to_string()));
    for name in &na {
        let (fa, fb) = (std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
        assert_eq!(fa, fb, "artifact {name} differs between runs");
    }
    println!(
        "criterion 10 [PASS] verify twice at the same scale: {} artifacts byte-identical",
        na.len()
    );
}
