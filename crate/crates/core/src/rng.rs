//! Deterministic random streams.
//!
//! Every replicate, restart and grid point draws from its own ChaCha8
//! stream keyed by `(seed, index)`, so results do not depend on the order
//! in which parallel work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed, used when a stream must itself seed nested work.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    stream_rng(seed, stream).next_u64()
}
