use sha2::{Digest, Sha256};

/// Per-run seed: the first eight bytes of SHA-256 over the run's identity.
/// Each run's stream depends only on its own key, so adding variants or
/// functions leaves existing runs untouched.
pub fn derive_seed(base_seed: u64, variant: &str, instance: &str, run: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    for part in [variant.as_bytes(), instance.as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.update((run as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
