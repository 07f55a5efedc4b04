//! Periodic linear operators on [`Image`]s: forward differences, their
//! adjoints, blur by a [`Kernel`], BCCB spectra, and the degradation model
//! `g = H f + noise`.

use crate::error::{Error, Result};
use crate::fft::{Fft2, Spectrum};
use crate::image::Image;
use crate::kernel::Kernel;
use crate::noise::GaussianNoise;

/// `(grad_x f)(r, c) = f(r + 1, c) - f(r, c)`, wrapping at the last row.
pub fn grad_x(img: &Image) -> Image {
    let n = img.n();
    Image::from_fn(n, |r, c| img.get((r + 1) % n, c) - img.get(r, c))
}

/// `(grad_y f)(r, c) = f(r, c + 1) - f(r, c)`, wrapping at the last column.
pub fn grad_y(img: &Image) -> Image {
    let n = img.n();
    Image::from_fn(n, |r, c| img.get(r, (c + 1) % n) - img.get(r, c))
}

/// Transpose of [`grad_x`]: `w(r - 1, c) - w(r, c)`.
pub fn grad_x_adjoint(img: &Image) -> Image {
    let n = img.n();
    Image::from_fn(n, |r, c| img.get((r + n - 1) % n, c) - img.get(r, c))
}

/// Transpose of [`grad_y`].
pub fn grad_y_adjoint(img: &Image) -> Image {
    let n = img.n();
    Image::from_fn(n, |r, c| img.get(r, (c + n - 1) % n) - img.get(r, c))
}

fn check_fits(k: &Kernel, n: usize) -> Result<()> {
    if k.rows() > n || k.cols() > n {
        return Err(Error::KernelTooLarge { rows: k.rows(), cols: k.cols(), n });
    }
    Ok(())
}

/// Periodic correlation with the anchor on the output pixel (see [`crate::kernel`]).
pub fn apply_psf_periodic(img: &Image, k: &Kernel) -> Result<Image> {
    let n = img.n();
    check_fits(k, n)?;
    if k.is_identity() {
        return Ok(img.clone());
    }
    let (ar, ac) = k.anchor();
    let mut out = vec![0.0; n * n];
    for a in 0..k.rows() {
        // offsets reduced mod n so all index math stays unsigned
        let dr = (a + n - ar % n) % n;
        for b in 0..k.cols() {
            let w = k.weight(a, b);
            if w == 0.0 {
                continue;
            }
            let dc = (b + n - ac % n) % n;
            for c in 0..n {
                let src_col = &img.data()[((c + dc) % n) * n..][..n];
                let dst = &mut out[c * n..(c + 1) * n];
                for (r, o) in dst.iter_mut().enumerate() {
                    *o += w * src_col[(r + dr) % n];
                }
            }
        }
    }
    Ok(Image::from_vec(n, out))
}

/// The kernel's periodic impulse response on an `n x n` grid: weight `(a, b)`
/// lands at `(anchor_row - a, anchor_col - b) mod n`.
pub fn impulse_response(k: &Kernel, n: usize) -> Result<Image> {
    check_fits(k, n)?;
    let (ar, ac) = k.anchor();
    let mut grid = vec![0.0; n * n];
    for a in 0..k.rows() {
        for b in 0..k.cols() {
            let r = (ar + n - a) % n;
            let c = (ac + n - b) % n;
            grid[c * n + r] += k.weight(a, b);
        }
    }
    Ok(Image::from_vec(n, grid))
}

/// Eigenvalues of the BCCB matrix of `k` on an `n x n` periodic grid.
pub fn psf_spectrum(k: &Kernel, n: usize) -> Result<Spectrum> {
    psf_spectrum_with(&Fft2::new(n), k)
}

pub fn psf_spectrum_with(fft: &Fft2, k: &Kernel) -> Result<Spectrum> {
    let h = impulse_response(k, fft.n())?;
    Ok(Spectrum::new(fft.n(), fft.forward(&h)))
}

/// Spectrum of [`grad_x`]: the DFT of its response to a unit impulse.
pub fn grad_x_spectrum(fft: &Fft2) -> Spectrum {
    Spectrum::new(fft.n(), fft.forward(&grad_x(&unit_impulse(fft.n()))))
}

pub fn grad_y_spectrum(fft: &Fft2) -> Spectrum {
    Spectrum::new(fft.n(), fft.forward(&grad_y(&unit_impulse(fft.n()))))
}

fn unit_impulse(n: usize) -> Image {
    Image::zeros(n).with_pixel(0, 0, 1.0)
}

/// Blurred image plus the noise field that was added to it.
#[derive(Debug, Clone)]
pub struct Degraded {
    pub blurred: Image,
    pub noise: Image,
    pub observed: Image,
}

/// `g = k * img + eta` with `eta ~ N(0, noise_std^2)` drawn from [`GaussianNoise`] keyed by `seed`.
pub fn degrade(img: &Image, k: &Kernel, noise_std: f64, seed: u64) -> Result<Image> {
    Ok(degrade_parts(img, k, noise_std, seed)?.observed)
}

pub fn degrade_parts(img: &Image, k: &Kernel, noise_std: f64, seed: u64) -> Result<Degraded> {
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(Error::InvalidParameter(format!("noise std {noise_std} must be nonnegative")));
    }
    let blurred = apply_psf_periodic(img, k)?;
    let noise = if noise_std == 0.0 {
        Image::zeros(img.n())
    } else {
        GaussianNoise::new(seed).field(img.n(), noise_std)
    };
    let observed = blurred.add(&noise);
    Ok(Degraded { blurred, noise, observed })
}
