//! Seeded parameter sampling.
//!
//! All randomness flows through a ChaCha20 generator seeded with a 64-bit
//! value from the configuration, so every run is reproducible bit for bit on
//! a given platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// `count` i.i.d. uniform points in the box `bounds`.
pub fn uniform_points(bounds: &[[f64; 2]], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            bounds
                .iter()
                .map(|b| {
                    let u: f64 = rng.gen();
                    b[0] + u * (b[1] - b[0])
                })
                .collect()
        })
        .collect()
}
