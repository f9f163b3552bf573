//! Deterministic random streams.
//!
//! Every stochastic routine in the crate takes its randomness from a
//! [`ChaCha8Rng`] whose seed is derived from a master seed plus a path of
//! counters (cell index, replication index, concern tag, ...). Two tasks with
//! different paths never share a stream, so results do not depend on the
//! order in which a worker pool happens to schedule them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random number generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Concern tags mixed into stream paths.
pub mod tag {
    pub const SEEDING: u64 = 0x5345_4544;
    pub const RECRUITMENT: u64 = 0x5245_4352;
    pub const REPORTING: u64 = 0x5245_504f;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const NETWORK: u64 = 0x4e45_5457;
    pub const GROUPS: u64 = 0x4752_5053;
    pub const TUNING: u64 = 0x5455_4e45;
    pub const REPLICATION: u64 = 0x5245_504c;
    pub const PILOT: u64 = 0x5049_4c54;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a counter path into a 64-bit seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// A fresh generator for `(master, path)`.
pub fn stream(master: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, path))
}
