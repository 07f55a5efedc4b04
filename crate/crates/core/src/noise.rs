//! Seeded Gaussian noise.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Each uniform is `(next_u64() >> 11) * 2^-53`,
//! and normals come from the Box-Muller transform on consecutive uniform pairs
//! `(u1, u2)`: `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` followed by the matching
//! `sin` term. Outputs are bit-identical for a given seed on every platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::image::Image;

pub struct GaussianNoise {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianNoise {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), spare: None }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal draw.
    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// `n x n` field of i.i.d. `N(0, std^2)` samples, filled in linear-index order.
    pub fn field(&mut self, n: usize, std: f64) -> Image {
        Image::from_vec(n, (0..n * n).map(|_| std * self.next_standard()).collect())
    }
}

/// Convenience wrapper: a fresh generator keyed by `seed`.
pub fn gaussian_field(n: usize, std: f64, seed: u64) -> Image {
    GaussianNoise::new(seed).field(n, std)
}
