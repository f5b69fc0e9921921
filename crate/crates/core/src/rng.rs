//! Seed derivation for reproducible Monte Carlo substreams.
//!
//! A master seed is split into independent per-realization seeds with a
//! counter-based mix (SplitMix64 finalizer over `(master, counter)`), so a
//! realization can be regenerated without replaying the ones before it.
//! Within a realization, ChaCha stream ids separate the consumers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// ChaCha stream used for channel draws.
pub const STREAM_CHANNEL: u64 = 0;
/// First ChaCha stream used for solver restarts; restart `l` uses `STREAM_RESTART_BASE + l`.
pub const STREAM_RESTART_BASE: u64 = 1 << 32;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of substream `counter` from `master`.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    splitmix64(splitmix64(master) ^ counter.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Generator for stream `stream` of the given seed.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
