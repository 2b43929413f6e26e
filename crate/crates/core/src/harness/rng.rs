//! Seeded random streams.
//!
//! Every random quantity in an experiment is drawn from its own ChaCha8
//! stream, keyed by a SplitMix64 hash of `(master seed, purpose, trial,
//! restart)`. Streams never depend on the method under test, so all methods
//! see the same signals, noise and initializations, and results do not depend
//! on the order in which trials are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Signal = 1,
    Noise = 2,
    Init = 3,
}

pub fn splitmix64(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, purpose: Purpose, trial: u64, restart: u64) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ purpose as u64);
    h = splitmix64(h ^ trial);
    splitmix64(h ^ restart)
}

pub fn stream(master: u64, purpose: Purpose, trial: u64, restart: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, purpose, trial, restart))
}
