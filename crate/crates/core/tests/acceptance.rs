//! Runs every acceptance check once, printing one PASS/FAIL line each.
//! The lines go straight to stdout so they show up without `--nocapture`.

use std::io::Write;

use cocycle_core::verify::{run_check, CheckId, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for id in CheckId::ALL {
        let outcome = run_check(id, DEFAULT_SEED, None);
        writeln!(std::io::stdout().lock(), "{}", outcome.line()).unwrap();
        if !outcome.passed() {
            failed.push(outcome.label);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
