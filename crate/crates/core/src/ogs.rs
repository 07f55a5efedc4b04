//! Overlapping group sparsity.
//!
//! For a field `v` and group side `K`, every pixel `(r, c)` owns the `K x K`
//! window covering rows `r - m1 ..= r + m2` and columns `c - m1 ..= c + m2`,
//! where `m1 = floor((K - 1) / 2)` and `m2 = floor(K / 2)`. Pixels outside the
//! image read as zero. The penalty `phi(v)` sums the Euclidean norms of all
//! `n^2` windows.
//!
//! [`ogs_prox_mm`] approximately solves
//! `min_v 1/2 ||v - v0||^2 + mu * phi(v)` by majorization-minimization: each
//! group norm is bounded above by a quadratic tangent at the current iterate,
//! giving a diagonal reweighted problem with the closed-form update
//! `v = v0 / (1 + mu * Lambda(v_prev)^2)`.

use crate::error::{Error, Result};
use crate::image::Image;

/// Default floor added to squared group norms before the `-1/2` power.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    size: usize,
}

impl GroupSpec {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("group size must be positive".into()));
        }
        Ok(Self { size })
    }

    /// Group side `K`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Extent of the window before the owning pixel.
    pub fn m1(&self) -> usize {
        (self.size - 1) / 2
    }

    /// Extent of the window after the owning pixel.
    pub fn m2(&self) -> usize {
        self.size / 2
    }
}

impl Default for GroupSpec {
    fn default() -> Self {
        Self { size: 3 }
    }
}

/// Inner-solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmConfig {
    /// Weight on the group penalty.
    pub mu: f64,
    /// Number of MM updates.
    pub iterations: usize,
    /// Stop early once `||v_new - v|| / ||v|| < inner_tol`; `0` runs all iterations.
    pub inner_tol: f64,
    pub eps_floor: f64,
}

impl MmConfig {
    pub fn new(mu: f64) -> Self {
        Self { mu, iterations: 5, inner_tol: 0.0, eps_floor: DEFAULT_EPS_FLOOR }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_eps_floor(mut self, eps_floor: f64) -> Self {
        self.eps_floor = eps_floor;
        self
    }

    pub fn with_inner_tol(mut self, inner_tol: f64) -> Self {
        self.inner_tol = inner_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {} must be nonnegative", self.mu)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("MM iterations must be positive".into()));
        }
        if !(self.inner_tol >= 0.0) {
            return Err(Error::InvalidParameter("inner tolerance must be nonnegative".into()));
        }
        if !(self.eps_floor >= 0.0) || !self.eps_floor.is_finite() {
            return Err(Error::InvalidParameter("eps floor must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Zero-padded box sum: `out(r, c) = sum over dr, dc in lo..=hi of x(r + dr, c + dc)`.
fn box_sum(x: &Image, lo: isize, hi: isize) -> Image {
    let n = x.n();
    let ni = n as isize;
    let window = |line: &[f64], i: usize| -> f64 {
        let start = (i as isize + lo).max(0);
        let end = (i as isize + hi).min(ni - 1);
        if start > end {
            0.0
        } else {
            line[start as usize..=end as usize].iter().sum()
        }
    };
    // along rows (contiguous columns)
    let mut tmp = vec![0.0; n * n];
    for c in 0..n {
        let col = &x.data()[c * n..(c + 1) * n];
        for r in 0..n {
            tmp[c * n + r] = window(col, r);
        }
    }
    // along columns
    let mut out = vec![0.0; n * n];
    let mut line = vec![0.0; n];
    for r in 0..n {
        for c in 0..n {
            line[c] = tmp[c * n + r];
        }
        for c in 0..n {
            out[c * n + r] = window(&line, c);
        }
    }
    Image::from_vec(n, out)
}

fn squared_group_norms(v: &Image, spec: GroupSpec) -> Image {
    box_sum(&v.map(|x| x * x), -(spec.m1() as isize), spec.m2() as isize)
}

/// Per-pixel norm of the group owned by that pixel.
pub fn group_norm_field(v: &Image, spec: GroupSpec) -> Image {
    squared_group_norms(v, spec).map(f64::sqrt)
}

/// The overlapping-group penalty `phi(v)`.
pub fn ogs_value(v: &Image, spec: GroupSpec) -> f64 {
    group_norm_field(v, spec).sum()
}

/// Squared diagonal of the majorizer weights: for each pixel, the sum of
/// `(||u_group||^2 + eps_floor)^(-1/2)` over every group containing it.
pub fn mm_weights_squared(u: &Image, spec: GroupSpec, eps_floor: f64) -> Image {
    let inv = squared_group_norms(u, spec).map(|s| (s + eps_floor).powf(-0.5));
    // groups containing pixel p are owned by p - m2 ..= p + m1
    box_sum(&inv, -(spec.m2() as isize), spec.m1() as isize)
}

/// Diagonal of `Lambda(u)`, stored as an image.
pub fn mm_weights(u: &Image, spec: GroupSpec, eps_floor: f64) -> Image {
    mm_weights_squared(u, spec, eps_floor).map(f64::sqrt)
}

/// `1/2 ||v - v0||^2 + mu * phi(v)`.
pub fn prox_objective(v: &Image, v0: &Image, spec: GroupSpec, mu: f64) -> f64 {
    0.5 * v.sub(v0).norm_sq() + mu * ogs_value(v, spec)
}

/// Quadratic upper bound of [`prox_objective`] built at `u`:
/// `1/2 ||v - v0||^2 + mu/2 (||Lambda(u) v||^2 + sum of guarded group norms of u)`,
/// where the guarded norm is `sqrt(||u_group||^2 + eps_floor)`.
pub fn majorizer_value(
    v: &Image,
    u: &Image,
    v0: &Image,
    spec: GroupSpec,
    mu: f64,
    eps_floor: f64,
) -> f64 {
    let w2 = mm_weights_squared(u, spec, eps_floor);
    let weighted: f64 = w2.data().iter().zip(v.data()).map(|(w, x)| w * x * x).sum();
    let constant: f64 = squared_group_norms(u, spec).data().iter().map(|s| (s + eps_floor).sqrt()).sum();
    0.5 * v.sub(v0).norm_sq() + 0.5 * mu * (weighted + constant)
}

/// MM solution of the group-sparse proximal problem, starting from `v0`.
pub fn ogs_prox_mm(v0: &Image, spec: GroupSpec, cfg: &MmConfig) -> Image {
    ogs_prox_mm_observed(v0, spec, cfg, |_, _| {})
}

/// As [`ogs_prox_mm`], calling `observer(k, v_k)` after each update `k = 1, 2, ...`.
pub fn ogs_prox_mm_observed(
    v0: &Image,
    spec: GroupSpec,
    cfg: &MmConfig,
    mut observer: impl FnMut(usize, &Image),
) -> Image {
    let mut v = v0.clone();
    for k in 1..=cfg.iterations {
        let w2 = mm_weights_squared(&v, spec, cfg.eps_floor);
        let next = Image::from_vec(
            v0.n(),
            v0.data().iter().zip(w2.data()).map(|(&x, &w)| x / (1.0 + cfg.mu * w)).collect(),
        );
        observer(k, &next);
        let step = next.sub(&v).norm();
        let prev_norm = v.norm();
        v = next;
        if step == 0.0 || (cfg.inner_tol > 0.0 && step < cfg.inner_tol * prev_norm) {
            break;
        }
    }
    v
}
