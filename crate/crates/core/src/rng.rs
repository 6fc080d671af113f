//! Counter-based randomness.
//!
//! Every draw is a pure function of a key tuple, so results never depend on
//! the order in which trials or node pairs are visited.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const KEY_INIT: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn hash3(a: u64, b: u64, c: u64) -> u64 {
    let mut h = KEY_INIT;
    for w in [a, b, c] {
        h = mix64(h ^ w).wrapping_add(GOLDEN_GAMMA);
    }
    mix64(h)
}

/// Seed for stream `index` split off from `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    hash3(master, index, 0x5EED)
}

/// Uniform draw in `[0, 1)` keyed on `(seed, i, j)`; symmetric in `i` and `j`.
#[inline]
pub fn pair_uniform(seed: u64, i: usize, j: usize) -> f64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    to_unit(hash3(seed, lo as u64, hi as u64))
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
