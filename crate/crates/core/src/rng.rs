//! Counter-style seed derivation.
//!
//! Every random stream in the crate is a pure function of a base seed and a
//! tuple of indices, so clause `j` of a formula never depends on which worker
//! produced clause `j - 1`.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator behind every stream.
pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `base` with `parts` into a new 64-bit seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = splitmix_finalize(base.wrapping_add(GOLDEN_GAMMA));
    for &p in parts {
        h = splitmix_finalize(h ^ splitmix_finalize(p.wrapping_add(GOLDEN_GAMMA)));
    }
    h
}

/// Independent stream number `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, &[index]))
}
