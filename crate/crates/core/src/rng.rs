//! Seeded random streams.
//!
//! All randomized operations draw from ChaCha8 seeded with a 64-bit value,
//! which is portable across platforms. Parallel work derives independent
//! streams from the same seed by stream index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Name recorded in model files and manifests.
pub const RNG_NAME: &str = "chacha8";

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut rng = seeded(seed);
    rng.set_stream(index);
    rng
}
