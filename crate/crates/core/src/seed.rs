//! Counter-based seed derivation.
//!
//! Every random draw in an experiment comes from a generator seeded with
//! `derive_seed(master, stream, index)`, where `stream` names the purpose
//! (code draw, sampling, …) and `index` is the trial number. Seeds depend only
//! on their coordinates, so results are identical at any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_CODE: u64 = 1;
pub const STREAM_SAMPLE: u64 = 2;
pub const STREAM_NOISE: u64 = 3;
pub const STREAM_MONTE_CARLO: u64 = 4;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix(mix(mix(master) ^ stream) ^ index)` with the SplitMix64 finalizer.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(mix(master) ^ stream) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    rng(derive_seed(master, stream, index))
}
