use std::time::Instant;

use vvhecke::hecke::Tamper;
use vvhecke::suites::{run_suite, Suite};

fn run(s: Suite) {
    let t = Instant::now();
    let checks = run_suite(s, 1, Tamper::None);
    for c in &checks {
        eprintln!(
            "{} {} {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    eprintln!("{s:?}: {:?}", t.elapsed());
    assert!(checks.iter().all(|c| c.passed), "{s:?} suite has failures");
}

#[test]
fn weil_suite() {
    run(Suite::Weil);
}

#[test]
fn theta_suite() {
    run(Suite::Theta);
}

#[test]
fn hecke_suite() {
    run(Suite::Hecke);
}

#[test]
fn bs_suite() {
    run(Suite::Bs);
}

#[test]
fn tampered_prefactor_is_located() {
    let checks = run_suite(Suite::Hecke, 1, Tamper::Prefactor);
    let bad: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    assert!(!bad.is_empty());
    assert!(bad
        .iter()
        .any(|c| c.record["first_mismatch"]["coset"].is_array()));
}
