//! Seeded synthetic test images with known ground truth.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::image::Image;

fn uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
}

/// Piecewise-constant `n x n` image: a flat background overlaid with a few
/// rectangles and discs whose positions, sizes and gray levels come from `seed`.
/// Intensities stay inside `[20, 235]`.
pub fn piecewise_constant(n: usize, seed: u64) -> Image {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let nf = n as f64;
    let mut pixels = vec![uniform(&mut rng, 20.0, 80.0); n * n];
    for shape in 0..8 {
        let level = uniform(&mut rng, 20.0, 235.0);
        let cr = uniform(&mut rng, 0.15, 0.85) * nf;
        let cc = uniform(&mut rng, 0.15, 0.85) * nf;
        let half_h = uniform(&mut rng, 0.06, 0.25) * nf;
        let half_w = uniform(&mut rng, 0.06, 0.25) * nf;
        for c in 0..n {
            for r in 0..n {
                let (dr, dc) = (r as f64 + 0.5 - cr, c as f64 + 0.5 - cc);
                let inside = if shape % 2 == 0 {
                    dr.abs() <= half_h && dc.abs() <= half_w
                } else {
                    (dr / half_h).powi(2) + (dc / half_h).powi(2) <= 1.0
                };
                if inside {
                    pixels[c * n + r] = level;
                }
            }
        }
    }
    Image::from_vec(n, pixels.into_iter().map(f64::round).collect())
}
