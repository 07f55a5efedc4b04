//! Point-spread functions.
//!
//! A [`Kernel`] is a small dense weight grid plus an anchor. Filtering is
//! correlation-style: the anchor sits on the output pixel, so
//! `out(r, c) = sum_{a,b} w(a, b) * x(r + a - anchor_row, c + b - anchor_col)`
//! with indices wrapping periodically. For the symmetric Gaussian and box
//! kernels correlation and convolution coincide.
//!
//! Text format: a header line `rows cols anchor_r anchor_c` with a **one-based**
//! anchor, then `rows` lines of `cols` whitespace-separated reals. In memory the
//! anchor is zero-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance on the weight sum of normalized (blur) kernels.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: usize,
    cols: usize,
    /// Row-major weights.
    weights: Vec<f64>,
    anchor: (usize, usize),
}

impl Kernel {
    /// `weights` are row-major, `anchor` is zero-based.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, anchor: (usize, usize)) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidKernel("empty extent".into()));
        }
        if weights.len() != rows * cols {
            return Err(Error::InvalidKernel(format!(
                "{} weights for a {rows}x{cols} kernel",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidKernel("non-finite weight".into()));
        }
        if anchor.0 >= rows || anchor.1 >= cols {
            return Err(Error::InvalidKernel(format!(
                "anchor {anchor:?} outside a {rows}x{cols} kernel"
            )));
        }
        Ok(Self { rows, cols, weights, anchor })
    }

    pub fn identity() -> Self {
        Self { rows: 1, cols: 1, weights: vec![1.0], anchor: (0, 0) }
    }

    /// Sampled isotropic Gaussian on a `size x size` grid centred at the anchor,
    /// normalized to unit sum.
    pub fn gaussian(size: usize, std: f64) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!("Gaussian size {size} must be odd")));
        }
        if !(std > 0.0) || !std.is_finite() {
            return Err(Error::InvalidKernel(format!("Gaussian std {std} must be positive")));
        }
        let h = (size / 2) as f64;
        let mut weights = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                let (x, y) = (r as f64 - h, c as f64 - h);
                weights.push((-(x * x + y * y) / (2.0 * std * std)).exp());
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(size, size, weights, (size / 2, size / 2))
    }

    /// Uniform `size x size` box. The anchor is at one-based `(ceil(size/2), ceil(size/2))`.
    pub fn average(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidKernel("average size must be positive".into()));
        }
        let a = size.div_ceil(2) - 1;
        let w = 1.0 / (size * size) as f64;
        Self::new(size, size, vec![w; size * size], (a, a))
    }

    /// `[-1; +1]` down a column: correlating with it gives the periodic row difference.
    pub fn forward_difference_rows() -> Self {
        Self { rows: 2, cols: 1, weights: vec![-1.0, 1.0], anchor: (0, 0) }
    }

    /// `[-1, +1]` along a row.
    pub fn forward_difference_cols() -> Self {
        Self { rows: 1, cols: 2, weights: vec![-1.0, 1.0], anchor: (0, 0) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based anchor.
    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, r: usize, c: usize) -> f64 {
        self.weights[r * self.cols + c]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.sum() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn is_identity(&self) -> bool {
        self.rows == 1 && self.cols == 1 && self.weights[0] == 1.0
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.rows,
            self.cols,
            self.anchor.0 + 1,
            self.anchor.1 + 1
        );
        for r in 0..self.rows {
            let line: Vec<String> =
                (0..self.cols).map(|c| format!("{}", self.weight(r, c))).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidKernel("empty kernel file".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::InvalidKernel(format!("bad header field {t:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols, ar, ac] = head[..] else {
            return Err(Error::InvalidKernel("header must be `rows cols anchor_r anchor_c`".into()));
        };
        if ar == 0 || ac == 0 {
            return Err(Error::InvalidKernel("anchor is one-based".into()));
        }
        let mut weights = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidKernel(format!("missing weight row {}", r + 1)))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::InvalidKernel(format!("bad weight {t:?}"))))
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(Error::InvalidKernel(format!(
                    "row {} has {} weights, expected {cols}",
                    r + 1,
                    row.len()
                )));
            }
            weights.extend(row);
        }
        if lines.next().is_some() {
            return Err(Error::InvalidKernel("trailing data after weights".into()));
        }
        Self::new(rows, cols, weights, (ar - 1, ac - 1))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Shell-friendly kernel description: `gaussian:SIZE:STD`, `average:SIZE`,
/// `identity` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Gaussian { size: usize, std: f64 },
    Average { size: usize },
    Identity,
    File(String),
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        match self {
            KernelSpec::Gaussian { size, std } => Kernel::gaussian(*size, *std),
            KernelSpec::Average { size } => Kernel::average(*size),
            KernelSpec::Identity => Ok(Kernel::identity()),
            KernelSpec::File(path) => Kernel::load(path),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKernel(format!("unrecognized kernel spec {s:?}"));
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(bad());
            }
            return Ok(KernelSpec::File(path.to_string()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts[..] {
            ["identity"] => Ok(KernelSpec::Identity),
            ["average", size] => Ok(KernelSpec::Average { size: size.parse().map_err(|_| bad())? }),
            ["gaussian", size, std] => Ok(KernelSpec::Gaussian {
                size: size.parse().map_err(|_| bad())?,
                std: std.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}
