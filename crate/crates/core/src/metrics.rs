//! Restoration quality metrics.

use crate::error::{Error, Result};
use crate::image::Image;

/// Peak value of 8-bit images.
pub const MAX_8BIT: f64 = 255.0;

/// `||reference - estimate|| / ||reference||`.
pub fn rel_err(reference: &Image, estimate: &Image) -> Result<f64> {
    reference.ensure_same_size(estimate)?;
    let denom = reference.norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(reference.sub(estimate).norm() / denom)
}

/// Peak signal-to-noise ratio in dB: `10 log10(n^2 max_val^2 / ||reference - estimate||^2)`.
///
/// Identical images give `f64::INFINITY`. Panics if the sides differ.
pub fn psnr(reference: &Image, estimate: &Image, max_val: f64) -> f64 {
    let err = reference.sub(estimate).norm_sq();
    if err == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (reference.len() as f64 * max_val * max_val / err).log10()
}

/// Blurred signal-to-noise ratio in dB: `20 log10(||g|| / ||eta||)`.
pub fn bsnr(g: &Image, eta: &Image) -> Result<f64> {
    g.ensure_same_size(eta)?;
    let noise = eta.norm();
    if noise == 0.0 {
        return Err(Error::ZeroNoise);
    }
    Ok(20.0 * (g.norm() / noise).log10())
}

/// Noise standard deviation whose expected energy `n^2 std^2` yields the target
/// BSNR against the noiseless `blurred` image.
pub fn noise_std_for_bsnr(blurred: &Image, target_bsnr_db: f64) -> Result<f64> {
    let norm = blurred.norm();
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    if target_bsnr_db.is_nan() {
        return Err(Error::InvalidParameter("target BSNR is NaN".into()));
    }
    Ok(norm / (blurred.n() as f64 * 10f64.powf(target_bsnr_db / 20.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    /// `f64::INFINITY` when the images are identical.
    pub psnr_db: f64,
    pub rel_err: f64,
    pub bsnr_db: Option<f64>,
}

impl MetricReport {
    pub fn compare(reference: &Image, estimate: &Image, max_val: f64) -> Result<Self> {
        Ok(Self {
            rel_err: rel_err(reference, estimate)?,
            psnr_db: psnr(reference, estimate, max_val),
            bsnr_db: None,
        })
    }
}
