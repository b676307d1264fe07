//! Seed handling. Every stochastic operation takes an explicit seed and draws
//! from ChaCha8, so serial and parallel runs agree.

use core::hash::Hasher;

use fnv::FnvHasher;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives a per-record seed from the run seed and a stable record id.
pub fn record_seed(seed: u64, record_id: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(&seed.to_le_bytes());
    h.write(record_id.as_bytes());
    h.finish()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 64-bit FNV-1a of raw bytes.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}
