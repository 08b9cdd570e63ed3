mod common;

use std::time::{Duration, Instant};

use common::gradients::all_checks;

#[test]
fn every_trainable_component_passes_finite_differences() {
    let start = Instant::now();
    let checks = all_checks();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert!(checks.len() >= 12);
    assert!(start.elapsed() < Duration::from_secs(30));
}
