//! Seed mixing shared by the weight oracle and the ensemble harness.
//!
//! All derived seeds go through [`mix64`], the SplitMix64 output function
//! (Steele, Lea and Flood). It is a bijection on `u64`, so distinct inputs
//! always give distinct outputs. Replicate `i` of an ensemble with base seed
//! `b` uses
//!
//! ```text
//! replicate_seed(b, i) = mix64(b + (i + 1) * 0x9E3779B97F4A7C15)   (wrapping)
//! ```
//!
//! which is the `i`-th output of a SplitMix64 stream started at `b`.

/// SplitMix64 increment (the 64-bit golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Environment seed for replicate `index` of an ensemble.
pub fn replicate_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Seed for the path-sampling stream of an environment. Salted so that it
/// never coincides with the stream used for the environment weights.
pub fn sampling_seed(environment_seed: u64) -> u64 {
    mix64(environment_seed ^ 0x5DEE_CE66_D1CE_5EED)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of SplitMix64 seeded with 0 (reference implementation).
        assert_eq!(replicate_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(replicate_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn replicate_seeds_distinct() {
        let seeds: HashSet<u64> = (0..10_000).map(|i| replicate_seed(1, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }
}
