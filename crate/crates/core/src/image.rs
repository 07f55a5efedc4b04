//! Square grayscale rasters and the box constraint.
//!
//! An [`Image`] stores an `n x n` field of `f64` intensities in column-major
//! order: the pixel at zero-based `(row, col)` lives at linear index
//! `col * n + row`. In one-based terms, entry `(i, j)` is element
//! `(j - 1) * n + i`, the ordering every operator in this crate assumes.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    n: usize,
    data: Vec<f64>,
}

impl Image {
    /// Wraps column-major data. Fails unless `data.len() == n * n` and every
    /// entry is finite.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != n * n {
            return Err(Error::DataLength { n, len: data.len(), expected: n * n });
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(idx));
        }
        Ok(Self { n, data })
    }

    /// Builds from row-major samples, the order used by raster files.
    pub fn from_row_major(n: usize, samples: &[f64]) -> Result<Self> {
        if samples.len() != n * n {
            return Err(Error::DataLength { n, len: samples.len(), expected: n * n });
        }
        Self::new(n, (0..n * n).map(|l| samples[(l % n) * n + l / n]).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::filled(n, 0.0)
    }

    pub fn filled(n: usize, value: f64) -> Self {
        assert!(n > 0, "image side must be positive");
        Self { n, data: vec![value; n * n] }
    }

    /// `f(row, col)` with zero-based indices.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n > 0, "image side must be positive");
        let data = (0..n * n).map(|l| f(l % n, l / n)).collect();
        Self { n, data }
    }

    /// Crate-internal constructor that skips validation; callers guarantee the length.
    pub(crate) fn from_vec(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Column-major samples.
    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        col * self.n + row
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[self.index(row, col)]
    }

    /// Returns a copy with one pixel replaced.
    pub fn with_pixel(mut self, row: usize, col: usize, value: f64) -> Self {
        let l = self.index(row, col);
        self.data[l] = value;
        self
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.n;
        (0..n * n).map(|k| self.get(k / n, k % n)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_vec(self.n, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Elementwise combination. Panics if the sides differ.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, other.n, "image sides differ");
        Self::from_vec(
            self.n,
            self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn add(&self, other: &Image) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Image) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn dot(&self, other: &Image) -> f64 {
        assert_eq!(self.n, other.n, "image sides differ");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Euclidean norm of the flattened image.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        assert_eq!(self.n, other.n, "image sides differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn ensure_same_size(&self, other: &Image) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// Closed intensity interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBounds {
    lower: f64,
    upper: f64,
}

impl BoxBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidBox { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// The 8-bit dynamic range `[0, 255]`.
    pub const fn eight_bit() -> Self {
        Self { lower: 0.0, upper: 255.0 }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }
}

impl Default for BoxBounds {
    fn default() -> Self {
        Self::eight_bit()
    }
}

/// Orthogonal projection onto the box: each entry is clamped into `[lower, upper]`.
pub fn project_box(img: &Image, bounds: BoxBounds) -> Image {
    img.map(|v| v.clamp(bounds.lower, bounds.upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_based_convention() {
        // [[1,2],[3,4]] has f_{1,1}=1, f_{2,1}=3, f_{1,2}=2, f_{2,2}=4
        let img = Image::from_row_major(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(img.data(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(img.get(1, 0), 3.0);
        assert_eq!(img.to_row_major(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(matches!(Image::new(2, vec![0.0; 3]), Err(Error::DataLength { .. })));
        assert!(matches!(Image::new(0, vec![]), Err(Error::EmptyImage)));
        assert!(matches!(
            Image::new(1, vec![f64::NAN]),
            Err(Error::NonFiniteData(0))
        ));
    }

    #[test]
    fn box_bounds_order() {
        assert!(BoxBounds::new(1.0, 1.0).is_err());
        assert!(BoxBounds::new(2.0, 1.0).is_err());
        assert!(BoxBounds::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn projection_cases() {
        let img = Image::new(2, vec![-5.0, 100.0, 300.0, 255.0]).unwrap();
        let p = project_box(&img, BoxBounds::eight_bit());
        assert_eq!(p.data(), &[0.0, 100.0, 255.0, 255.0]);

        let inside = Image::new(2, vec![0.0, 12.5, 254.0, 255.0]).unwrap();
        assert_eq!(project_box(&inside, BoxBounds::eight_bit()), inside);
    }

    fn image_strategy(n: usize) -> impl Strategy<Value = Image> {
        proptest::collection::vec(-500.0f64..500.0, n * n)
            .prop_map(move |d| Image::new(n, d).unwrap())
    }

    proptest! {
        #[test]
        fn index_round_trip(img in image_strategy(5)) {
            let rebuilt = Image::from_fn(5, |r, c| img.get(r, c));
            prop_assert_eq!(&rebuilt, &img);
            for r in 0..5 {
                for c in 0..5 {
                    prop_assert_eq!(img.index(r, c), c * 5 + r);
                }
            }
        }

        #[test]
        fn projection_idempotent(img in image_strategy(4)) {
            let b = BoxBounds::eight_bit();
            let once = project_box(&img, b);
            prop_assert_eq!(project_box(&once, b), once.clone());
            prop_assert!(once.data().iter().all(|&v| b.contains(v)));
        }

        #[test]
        fn projection_nonexpansive(x in image_strategy(4), y in image_strategy(4)) {
            let b = BoxBounds::eight_bit();
            let d = project_box(&x, b).sub(&project_box(&y, b)).norm();
            prop_assert!(d <= x.sub(&y).norm() + 1e-12);
        }
    }
}
