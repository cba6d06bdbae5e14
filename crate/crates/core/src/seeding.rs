//! Counter-based seed derivation, so that trial `t` of an experiment draws from the
//! same stream no matter which worker runs it.

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `(a, b)` under `master`.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(mix64(master) ^ a) ^ b.rotate_left(32))
}
