use sha2::{Digest, Sha256};

/// Derive an independent child seed from a parent seed and a key. Stable
/// across platforms and releases, unlike `std::hash`.
pub fn derive_seed(seed: u64, key: &[u8]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key);
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields 32 bytes"))
}

pub fn derive_indexed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &(index as u64).to_le_bytes())
}
