//! Seed derivation.
//!
//! Every random stream in an experiment (LF design, HF design, test design,
//! weight init, batch shuffling) is derived from one base seed and a stream
//! tag, so that changing one consumer never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags.
pub mod stream {
    pub const LF_DESIGN: u64 = 1;
    pub const HF_DESIGN: u64 = 2;
    pub const TEST_DESIGN: u64 = 3;
    pub const INIT_LF: u64 = 4;
    pub const INIT_HF: u64 = 5;
    pub const INIT_DISC: u64 = 6;
    pub const SHUFFLE_LF: u64 = 7;
    pub const SHUFFLE_HF: u64 = 8;
    pub const SUBSAMPLE: u64 = 9;
    pub const SCATTER: u64 = 10;
    pub const BASELINE: u64 = 11;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn stream_rng(seed: u64, tag: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, tag))
}
