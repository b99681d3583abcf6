//! Seeded generators and the root-seed fan-out used by every campaign.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type owned by each protocol run.
pub type ProtocolRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ProtocolRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `seed_i = split(root, i)`: the SplitMix64 output for state
/// `root + (i + 1) * 0x9E3779B97F4A7C15`.
pub fn split_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic uniform in [0, 1) derived from a seed and a key, without
/// touching any generator stream.
pub(crate) fn keyed_uniform(seed: u64, key: u64) -> f64 {
    (split_seed(seed, key) >> 11) as f64 / (1u64 << 53) as f64
}
