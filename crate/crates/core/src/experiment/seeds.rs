//! Component seeds derived from one master seed.
//!
//! `derive_seed(master, label)` is the first eight bytes, little-endian, of
//! `SHA-256(master as 8 little-endian bytes || label as UTF-8)`.

use sha2::{Digest, Sha256};

pub const ENVIRONMENT: &str = "environment";
pub const TRAINING: &str = "training";
pub const TIE_BREAKING: &str = "tie-breaking";

pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
