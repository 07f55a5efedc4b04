//! 2D DFT on square column-major grids.
//!
//! Convention: the forward transform is unnormalized and the inverse carries
//! the `1 / n^2` factor, so `inverse(forward(x)) == x` and
//! `||forward(x)||^2 == n^2 ||x||^2`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::image::Image;

/// Forward/inverse plans for one side length.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place unnormalized forward transform.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.run(&*self.forward, buf);
    }

    /// In-place inverse transform including the `1 / n^2` scale.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.run(&*self.inverse, buf);
        let scale = 1.0 / (self.n * self.n) as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    pub fn forward(&self, img: &Image) -> Vec<Complex64> {
        assert_eq!(img.n(), self.n, "image side does not match plan");
        let mut buf: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part. Also returns the largest
    /// discarded imaginary magnitude.
    pub fn inverse_real(&self, mut buf: Vec<Complex64>) -> (Image, f64) {
        self.inverse_in_place(&mut buf);
        let max_imag = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        (Image::from_vec(self.n, buf.into_iter().map(|z| z.re).collect()), max_imag)
    }

    fn run(&self, plan: &dyn Fft<f64>, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n * self.n, "buffer is not n x n");
        // columns are contiguous in column-major layout
        plan.process(buf);
        transpose_in_place(buf, self.n);
        plan.process(buf);
        transpose_in_place(buf, self.n);
    }
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    for c in 0..n {
        for r in (c + 1)..n {
            buf.swap(c * n + r, r * n + c);
        }
    }
}

/// Eigenvalues of a BCCB operator: the 2D DFT of its periodic impulse response,
/// laid out column-major like [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(n: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), n * n, "spectrum is not n x n");
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at zero-based frequency `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[col * self.n + row]
    }

    /// `|lambda|^2` per frequency.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Applies the operator: `inverse(spectrum * forward(x))`.
    pub fn apply(&self, fft: &Fft2, img: &Image) -> Image {
        let mut buf = fft.forward(img);
        buf.iter_mut().zip(&self.values).for_each(|(x, h)| *x *= h);
        fft.inverse_real(buf).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in [1, 2, 5, 8, 12] {
            let fft = Fft2::new(n);
            let img = Image::from_fn(n, |_, _| rng.random_range(-10.0..10.0));
            let spec = fft.forward(&img);
            let energy: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
            assert!((energy - (n * n) as f64 * img.norm_sq()).abs() <= 1e-9 * energy.max(1.0));
            let (back, imag) = fft.inverse_real(spec);
            assert!(back.max_abs_diff(&img) <= 1e-12);
            assert!(imag <= 1e-12);
        }
    }

    #[test]
    fn matches_direct_dft() {
        let n = 4;
        let img = Image::from_fn(n, |r, c| (r * 3 + c * c) as f64 - 2.5);
        let spec = Fft2::new(n).forward(&img);
        for u in 0..n {
            for v in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    for c in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * ((u * r + v * c) as f64) / n as f64;
                        acc += img.get(r, c) * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((spec[v * n + u] - acc).norm() <= 1e-10);
            }
        }
    }
}
