//! Counter-based randomness: every draw is a pure function of its position.

use crate::cell::Cell;
use crate::error::Result;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit(seed: u64, binding_id: u64, coord: &[usize], counter: u64) -> f64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ binding_id);
    for &c in coord {
        h = splitmix64(h ^ c as u64);
    }
    h = splitmix64(h ^ counter);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `rand(x)` at a given position: `1..=x` for integral `x`, `[0, x)` otherwise.
pub fn seeded_rand<C: Cell>(seed: u64, binding_id: u64, coord: &[usize], counter: u64, x: &C) -> Result<C> {
    C::rand(x, unit(seed, binding_id, coord, counter))
}
