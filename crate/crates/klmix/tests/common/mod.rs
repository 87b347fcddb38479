//! Shared helpers for the integration test suites.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

/// Deterministic generator: every suite draws from a fixed seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Run one acceptance criterion and print exactly one PASS/FAIL line for it.
///
/// Assertion panics propagate (so `cargo test` still reports the failure),
/// but only after the FAIL line is emitted.
pub fn criterion<F: FnOnce()>(number: u32, name: &str, body: F) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("ACCEPTANCE {number} ({name}): PASS"),
        Err(cause) => {
            println!("ACCEPTANCE {number} ({name}): FAIL");
            resume_unwind(cause);
        }
    }
}
