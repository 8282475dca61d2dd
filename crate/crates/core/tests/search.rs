mod common;

use std::time::Duration;

use common::search::random_sequences;

#[test]
fn random_tactic_sequences_preserve_code_and_contracts() {
    let s = random_sequences(1000, 2024).unwrap();
    assert!(s.accepted > 100, "only {} accepted", s.accepted);
    assert!(s.elapsed < Duration::from_secs(60), "{:?}", s.elapsed);
    println!("{} trials, {} steps accepted, {} rejected, {:?}", s.trials, s.accepted, s.rejected, s.elapsed);
}
