//! Stable seed derivation.
//!
//! Per-item random streams are derived from a run seed and a label through
//! SHA-256, so they do not depend on iteration order or on the standard
//! library's (unstable) hasher.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(42, "q-1"), derive_seed(42, "q-1"));
        assert_ne!(derive_seed(42, "q-1"), derive_seed(42, "q-2"));
        assert_ne!(derive_seed(42, "q-1"), derive_seed(43, "q-1"));
    }
}
