//! Deterministic seed derivation.
//!
//! Every randomized stage of the pipeline draws its seed from a single root
//! seed through [`split`], so whole runs are reproducible from one number.

/// Derives a child seed from `seed` for the stage identified by `tag`.
///
/// Distinct tags give statistically independent streams; the same
/// (seed, tag) pair always yields the same child seed.
pub fn split(seed: u64, tag: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(tag)))
}

/// SplitMix64 finalizer (Steele, Lea & Flood).
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stage tags used by the CLI and the evaluation harness.
pub mod tags {
    pub const SYNTH: u64 = 1;
    pub const SWEEP: u64 = 2;
    pub const EXPERIMENT: u64 = 3;
    pub const EMBED: u64 = 4;
    pub const FOLD: u64 = 5;
    pub const SELECTION: u64 = 6;
    pub const CLUSTER: u64 = 7;
}
