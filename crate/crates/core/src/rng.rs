//! Counter-based seeding.
//!
//! Every random stream in this crate is addressed by a path of 64-bit words,
//! `(seed, domain, index, ...)`. The path is folded through the SplitMix64
//! finalizer into one 64-bit key, and the key seeds a `ChaCha8Rng` through
//! `SeedableRng::seed_from_u64`. A stream therefore depends only on its path:
//! parameter draw `i` is the same whether draws are generated in order, out of
//! order, or on any number of threads.
//!
//! The mapping is part of the crate's reproducibility contract. Changing the
//! fold, the domain tags, or the generator changes every published number.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same seed on disjoint streams.
pub mod domain {
    pub const PARAMS: u64 = 0x5041_5241;
    pub const REALIZED: u64 = 0x5245_414c;
    pub const SIM: u64 = 0x5349_4d55;
    pub const SENSITIVITY: u64 = 0x5345_4e53;
    pub const IMPOSITION: u64 = 0x494d_504f;
    pub const PHASE: u64 = 0x5048_4153;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `seed` and `path` into a single stream key.
pub fn derive_key(seed: u64, path: &[u64]) -> u64 {
    let mut key = splitmix64(seed.wrapping_add(GOLDEN));
    for &word in path {
        key = splitmix64(key ^ word.wrapping_add(GOLDEN));
    }
    key
}

/// Generator for the stream addressed by `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_key(seed, path))
}

/// Uniform variate on `[0, 1)` built from the top 53 bits of one `u64`.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform variate on `[lo, hi]`; returns `lo` exactly when `lo == hi`.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_f64(rng)
}
