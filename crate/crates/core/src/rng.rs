//! Seeding and stream layout.
//!
//! Every simulated path draws from ChaCha8 generators keyed by the path seed.
//! Each independent model component reads its own ChaCha stream, so adding a
//! jump component never perturbs the Brownian draws of an existing one:
//!
//! | stream            | component                     |
//! |-------------------|-------------------------------|
//! | 0                 | Brownian increments           |
//! | 1                 | stochastic volatility driver  |
//! | 16 + i            | jump component `i`            |
//!
//! Replication seeds inside the Monte Carlo harness are
//! `base_seed ^ mix64((n << 32) | m)`; `mix64` is a bijection, so distinct
//! `(n, m)` pairs below `2^32` never share a seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BROWNIAN_STREAM: u64 = 0;
pub const VOLATILITY_STREAM: u64 = 1;
pub const JUMP_STREAM_BASE: u64 = 16;

/// Generator for one `(seed, stream)` pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn jump_stream(component: usize) -> u64 {
    JUMP_STREAM_BASE + component as u64
}

/// SplitMix64 finalizer. Bijective on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `m` at grid size `n`.
pub fn replication_seed(base_seed: u64, n: usize, m: usize) -> u64 {
    debug_assert!((n as u64) < (1 << 32) && (m as u64) < (1 << 32));
    base_seed ^ mix64(((n as u64) << 32) | m as u64)
}
