//! Deterministic seed derivation for parallel Monte-Carlo runs.
//!
//! Every stochastic task (instance, sub-instance) gets its own seed derived
//! from `(parent_seed, index)` through a fixed 64-bit mixing function, so
//! results depend only on the configuration and never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used throughout the simulation code. ChaCha8 is fast, seedable from a
/// `u64`, and produces the same stream on every platform.
pub type SimRng = ChaCha8Rng;

/// Odd golden-ratio constant; spreads consecutive indices across the u64 range.
const INDEX_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Bijective, with strong avalanche behavior.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the child seed for `index` under `seed`.
///
/// `index + 1` is used so that index 0 does not collapse to mixing the parent
/// seed with zero.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ index.wrapping_add(1).wrapping_mul(INDEX_STRIDE))
}

/// Builds the simulation RNG for a derived seed.
pub fn rng_from(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
