//! Seeded random streams.
//!
//! Every stochastic routine takes a 64-bit seed and derives an independent
//! ChaCha8 stream per unit of work (replicate, coordinate, window, ...) by
//! hashing the seed together with the unit's indices. Results therefore do not
//! depend on how the work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `seed` with a path of indices into a new 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &k| {
        splitmix64(acc.rotate_left(23) ^ splitmix64(k ^ 0xd6e8_feb8_6659_fd93))
    })
}

/// Stream for the unit of work identified by `path` under `seed`.
pub fn stream(seed: u64, path: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
