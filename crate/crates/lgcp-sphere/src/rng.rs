//! Deterministic random number streams.
//!
//! All stochastic routines take `&mut impl Rng` so callers control
//! reproducibility. Replicated experiments derive one independent stream per
//! replicate from a root seed: stream `k` of seed `s` is
//! `ChaCha8Rng::seed_from_u64(s)` with its stream counter set to `k`.
//! Replicates can then run in any order (or concurrently) without changing
//! any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Root stream for a run. Stream counter 0.
pub fn root_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for replicate `k` of the run seeded by `seed`.
pub fn replicate_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}
