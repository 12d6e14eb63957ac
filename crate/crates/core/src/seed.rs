//! Deterministic seed derivation.
//!
//! Every random stream in a run is keyed by the master seed and the position
//! of the consumer (repeat index, sweep cell, sample row), so results do not
//! depend on execution order or thread count.

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a seed with one more key.
pub fn mix(seed: u64, key: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ key.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Stream tags, so that different consumers of the same index never share a
/// stream.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const NLC_SYMBOLS: u64 = 2;
    pub const NLC_NOISE: u64 = 3;
    pub const HIDDEN_NOISE: u64 = 4;
    pub const READOUT_NOISE: u64 = 5;
}

/// Derives the seed for `(tag, index)` under `master`.
pub fn derive(master: u64, tag: u64, index: u64) -> u64 {
    mix(mix(master, tag), index)
}
