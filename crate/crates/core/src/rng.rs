//! Reproducible random streams.
//!
//! Every trial draws from its own ChaCha8 stream: the key comes from the run
//! seed and the 64-bit stream id is the trial (or block) index. Streams are
//! independent by construction, so results do not depend on how trials are
//! scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `stream` of the generator keyed by `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, e.g. one per campaign cell, from a parent seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // Stream ids above 2^63 are reserved for seed derivation so they never
    // collide with trial streams of the parent.
    substream(seed, index | (1 << 63)).next_u64()
}
