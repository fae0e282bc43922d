//! Keyed random streams.
//!
//! Every random quantity in the simulator is drawn from a stream addressed by
//! `(seed, domain, repetition, index)`. Streams never depend on evaluation
//! order, so rows, trees and repetitions can be processed in any order (or in
//! parallel) without changing results, and two assignment schemes evaluated
//! in the same repetition see the same per-row uniforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains. Distinct domains never share a stream.
pub mod domain {
    pub const SYNTHETIC: u64 = 1;
    pub const TAU: u64 = 2;
    pub const OUTCOMES: u64 = 3;
    pub const ORACLE: u64 = 4;
    pub const ASSIGN: u64 = 5;
    pub const HOLDOUT: u64 = 6;
    pub const FOLDS: u64 = 7;
    pub const FOREST: u64 = 8;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash an ordered list of words into one 64-bit key.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x5EED_u64, |acc, &w| splitmix(acc ^ splitmix(w)))
}

/// Address of a family of per-index streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub seed: u64,
    pub domain: u64,
    pub repetition: u64,
}

impl StreamKey {
    pub fn new(seed: u64, domain: u64, repetition: u64) -> Self {
        Self {
            seed,
            domain,
            repetition,
        }
    }

    pub fn word(&self, index: u64) -> u64 {
        mix(&[self.seed, self.domain, self.repetition, index])
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn uniform(&self, index: u64) -> f64 {
        (self.word(index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Independent generator for one index, for callers that need several draws.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.word(index))
    }
}

/// Derive a child seed from a master seed and a domain tag.
pub fn derive_seed(master: u64, domain: u64) -> u64 {
    mix(&[master, domain])
}
