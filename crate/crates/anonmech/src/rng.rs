//! Seeded random streams.
//!
//! Every randomized operation in the crate takes a caller-owned stream, so
//! results are reproducible from a single `u64` seed. Per-trial streams are
//! derived by a counter-based mix of (master seed, trial index), which makes
//! Monte Carlo estimates independent of execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type used throughout the crate.
pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seeded directly from a master seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(splitmix64(seed))
}

/// Stream for one trial, derived from (master seed, trial index).
pub fn trial_stream(seed: u64, trial: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial.wrapping_add(1))))
}
