//! Counter-based random streams.
//!
//! Every random draw in an experiment comes from the ChaCha stream selected
//! by `(base_seed, trial, role)`, so results do not depend on how trials are
//! scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// What a stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamRole {
    Train = 0,
    Test = 1,
    Auxiliary = 2,
    Reference = 3,
}

const ROLE_BITS: u32 = 4;

pub type SimRng = ChaCha12Rng;

/// Stream for `(base_seed, trial, role)`.
pub fn stream(base_seed: u64, trial: u64, role: StreamRole) -> SimRng {
    assert!(trial < (1 << (64 - ROLE_BITS)), "trial index out of range");
    let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
    rng.set_stream((trial << ROLE_BITS) | role as u64);
    rng
}

/// Derives an independent base seed for a sub-experiment (e.g. one sample
/// size of a sweep) with the SplitMix64 finalizer.
pub fn derive_seed(base_seed: u64, salt: u64) -> u64 {
    let mut z = base_seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
