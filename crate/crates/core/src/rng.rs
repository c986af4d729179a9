//! Reproducible random streams.
//!
//! Every Monte Carlo path draws from its own ChaCha8 stream selected by
//! `(seed, path index)`, so results do not depend on how paths are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for path `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent seed for a labelled sub-experiment (a noise
/// component, an eigenmode, a boundary atom).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(label.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
