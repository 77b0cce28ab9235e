//! Stable seed derivation.
//!
//! All randomness in the toolkit comes from ChaCha8 streams. When a stream
//! must depend on a string key as well as a numeric seed (a participant id,
//! a stimulus id), the two are combined with SHA-256 so the result does not
//! depend on the platform or on `std`'s unstable hasher.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// First eight bytes (little endian) of `SHA-256(seed_le || key)`.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_for(seed: u64, key: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, key))
}
