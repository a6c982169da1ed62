//! Counter-derived random streams.
//!
//! Every unit of independent work (one start node in one sampling round, one
//! training batch, ...) gets its own generator derived from the master seed
//! and a small tuple of counters. Results therefore do not depend on how work
//! is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams for different purposes apart even when their
/// counters coincide.
pub(crate) mod domain {
    pub const SAMPLE: u64 = 1;
    pub const COARSEN: u64 = 2;
    pub const INIT: u64 = 3;
    pub const SHUFFLE: u64 = 4;
    pub const NEGATIVE: u64 = 5;
    pub const WINDOW: u64 = 6;
    pub const SPLIT: u64 = 7;
    pub const KMEANS: u64 = 8;
    pub const SYNTH: u64 = 9;
    pub const SUBSAMPLE: u64 = 10;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes `seed` with `counters` into a 64-bit stream key.
pub fn derive_seed(seed: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn stream(seed: u64, counters: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, counters))
}
