//! Deterministic RNG streams.
//!
//! Every shot and every trial draws from its own ChaCha stream keyed by
//! `(seed, index)`, so results never depend on thread count or scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The RNG stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A child seed for the `index`-th sub-task of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // Stream u64::MAX is reserved for child seeds.
    let mut rng = stream(seed, u64::MAX);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}
