//! Counter-based seed splitting.
//!
//! Every random draw in the crate is keyed by `(master, stream, index)`, so a
//! task's randomness does not depend on which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers keep independent consumers of one master seed apart.
pub mod stream {
    pub const SEESAW: u64 = 1;
    pub const ZERO_SET: u64 = 2;
    pub const AUDIT: u64 = 3;
    pub const SAMPLING: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of task `index` in `stream` from `master`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
