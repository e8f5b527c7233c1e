//! Seed splitting. One root seed fans out to per-cell, per-restart and
//! per-scan streams without the streams overlapping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags for [`derive`].
pub mod tag {
    pub const CELL_PROFILE: u64 = 0x01;
    pub const SCATTER: u64 = 0x02;
    pub const POISSON: u64 = 0x03;
    pub const KMEANS_RESTART: u64 = 0x10;
    pub const ELBOW: u64 = 0x11;
    pub const SELECT_K: u64 = 0x12;
    pub const FINAL_FIT: u64 = 0x13;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `root` and a path of stream identifiers.
pub fn derive(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Portable generator used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
