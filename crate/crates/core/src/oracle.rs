//! Brute-force reference implementations for testing.
//!
//! Everything here is deliberately naive: dense `n^2 x n^2` operator matrices
//! assembled from their definitions, a dense linear solve of the
//! `f`-subproblem normal equations, literal loops over every group, and a plain
//! subgradient method and a dual projected-gradient solver for the
//! group-sparse proximal problem. None of it shares code with the fast paths
//! it checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::image::{BoxBounds, Image};
use crate::kernel::Kernel;
use crate::ogs::GroupSpec;

/// Largest side accepted by [`dense_from_kernel`].
pub const MAX_DENSE_SIDE: usize = 16;
/// Largest side accepted by [`dense_solve_f`].
pub const MAX_SOLVE_SIDE: usize = 8;
/// Largest side accepted by [`ogs_prox_subgradient`] and [`ogs_prox_dual`].
pub const MAX_SUBGRADIENT_SIDE: usize = 6;
/// Default step budget for [`ogs_prox_subgradient`].
pub const SUBGRADIENT_STEPS: usize = 400_000;

/// Dense matrix acting on column-major flattened images.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn identity(n: usize) -> Self {
        Self { n, matrix: DMatrix::identity(n * n, n * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn transpose(&self) -> Self {
        Self { n: self.n, matrix: self.matrix.transpose() }
    }

    pub fn apply(&self, img: &Image) -> Image {
        assert_eq!(img.n(), self.n, "operator side mismatch");
        let x = DVector::from_column_slice(img.data());
        Image::from_vec(self.n, (&self.matrix * x).as_slice().to_vec())
    }
}

fn to_vector(img: &Image) -> DVector<f64> {
    DVector::from_column_slice(img.data())
}

/// Dense BCCB matrix of periodic correlation with `k`, built entry by entry:
/// output pixel `(r, c)` reads input `(r + a - ar, c + b - ac) mod n` with weight `w(a, b)`.
pub fn dense_from_kernel(k: &Kernel, n: usize) -> Result<DenseOperator> {
    if n == 0 || n > MAX_DENSE_SIDE {
        return Err(Error::InvalidParameter(format!(
            "dense operators are limited to 1 <= n <= {MAX_DENSE_SIDE}, got {n}"
        )));
    }
    if k.rows() > n || k.cols() > n {
        return Err(Error::KernelTooLarge { rows: k.rows(), cols: k.cols(), n });
    }
    let (ar, ac) = k.anchor();
    let wrap = |i: isize| i.rem_euclid(n as isize) as usize;
    let mut m = DMatrix::zeros(n * n, n * n);
    for c in 0..n {
        for r in 0..n {
            let out = c * n + r;
            for a in 0..k.rows() {
                for b in 0..k.cols() {
                    let ir = wrap(r as isize + a as isize - ar as isize);
                    let ic = wrap(c as isize + b as isize - ac as isize);
                    m[(out, ic * n + ir)] += k.weight(a, b);
                }
            }
        }
    }
    Ok(DenseOperator { n, matrix: m })
}

pub fn dense_grad_x(n: usize) -> Result<DenseOperator> {
    dense_from_kernel(&Kernel::forward_difference_rows(), n)
}

pub fn dense_grad_y(n: usize) -> Result<DenseOperator> {
    dense_from_kernel(&Kernel::forward_difference_cols(), n)
}

/// Right-hand data of the `f`-subproblem.
#[derive(Debug, Clone)]
pub struct FSubproblemData<'a> {
    pub g: &'a Image,
    pub v_x: &'a Image,
    pub v_y: &'a Image,
    pub z: &'a Image,
    pub b1: &'a Image,
    pub b2: &'a Image,
    pub b3: &'a Image,
}

/// `H^T H + sigma Dx^T Dx + sigma Dy^T Dy + sigma I`.
pub fn normal_matrix(k: &Kernel, n: usize, sigma: f64) -> Result<DMatrix<f64>> {
    let h = dense_from_kernel(k, n)?.matrix;
    let dx = dense_grad_x(n)?.matrix;
    let dy = dense_grad_y(n)?.matrix;
    let eye = DMatrix::<f64>::identity(n * n, n * n);
    Ok(h.transpose() * &h + (dx.transpose() * &dx + dy.transpose() * &dy + eye) * sigma)
}

/// Dense Cholesky solve of the `f`-subproblem normal equations.
pub fn dense_solve_f(k: &Kernel, data: &FSubproblemData<'_>, sigma: f64) -> Result<Image> {
    let n = data.g.n();
    if n > MAX_SOLVE_SIDE {
        return Err(Error::InvalidParameter(format!("dense solve limited to n <= {MAX_SOLVE_SIDE}")));
    }
    let (a, rhs) = normal_system(k, data, sigma)?;
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("normal matrix is not positive definite".into()))?;
    Ok(Image::from_vec(n, chol.solve(&rhs).as_slice().to_vec()))
}

/// Assembled matrix and right-hand side of the `f`-subproblem.
pub fn normal_system(
    k: &Kernel,
    data: &FSubproblemData<'_>,
    sigma: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = data.g.n();
    let h = dense_from_kernel(k, n)?.matrix;
    let dx = dense_grad_x(n)?.matrix;
    let dy = dense_grad_y(n)?.matrix;
    let rhs = h.transpose() * to_vector(data.g)
        + (dx.transpose() * (to_vector(data.v_x) - to_vector(data.b1))) * sigma
        + (dy.transpose() * (to_vector(data.v_y) - to_vector(data.b2))) * sigma
        + (to_vector(data.z) - to_vector(data.b3)) * sigma;
    Ok((normal_matrix(k, n, sigma)?, rhs))
}

fn group_entries(v: &Image, spec: GroupSpec, r: usize, c: usize) -> Vec<(usize, usize)> {
    let n = v.n() as isize;
    let (m1, m2) = (spec.m1() as isize, spec.m2() as isize);
    let mut out = Vec::new();
    for dr in -m1..=m2 {
        for dc in -m1..=m2 {
            let (rr, cc) = (r as isize + dr, c as isize + dc);
            if (0..n).contains(&rr) && (0..n).contains(&cc) {
                out.push((rr as usize, cc as usize));
            }
        }
    }
    out
}

/// Sum over every pixel of the norm of its zero-padded `K x K` group.
pub fn ogs_value_naive(v: &Image, spec: GroupSpec) -> f64 {
    let n = v.n();
    let mut total = 0.0;
    for c in 0..n {
        for r in 0..n {
            let sq: f64 = group_entries(v, spec, r, c).iter().map(|&(i, j)| v.get(i, j).powi(2)).sum();
            total += sq.sqrt();
        }
    }
    total
}

/// Literal quadruple loop for the majorizer weights: at pixel `(r, t)`,
/// `sqrt( sum_{i,j=-m1..m2} ( sum_{k1,k2=-m1..m2} |u(r-i+k1, t-j+k2)|^2 + eps )^(-1/2) )`,
/// with out-of-range `u` read as zero and only in-range group owners counted.
pub fn mm_weights_naive(u: &Image, spec: GroupSpec, eps_floor: f64) -> Image {
    let n = u.n() as isize;
    let (m1, m2) = (spec.m1() as isize, spec.m2() as isize);
    let at = |r: isize, c: isize| -> f64 {
        if (0..n).contains(&r) && (0..n).contains(&c) {
            u.get(r as usize, c as usize)
        } else {
            0.0
        }
    };
    Image::from_fn(u.n(), |r, t| {
        let (r, t) = (r as isize, t as isize);
        let mut outer = 0.0;
        for i in -m1..=m2 {
            for j in -m1..=m2 {
                let (gr, gt) = (r - i, t - j);
                if !(0..n).contains(&gr) || !(0..n).contains(&gt) {
                    continue;
                }
                let mut inner = 0.0;
                for k1 in -m1..=m2 {
                    for k2 in -m1..=m2 {
                        inner += at(gr + k1, gt + k2).powi(2);
                    }
                }
                outer += (inner + eps_floor).powf(-0.5);
            }
        }
        outer.sqrt()
    })
}

/// `1/2 ||v - v0||^2 + mu * phi(v)` evaluated with [`ogs_value_naive`].
pub fn prox_objective_naive(v: &Image, v0: &Image, spec: GroupSpec, mu: f64) -> f64 {
    0.5 * v.sub(v0).norm_sq() + mu * ogs_value_naive(v, spec)
}

/// Minimizes `1/2 ||v - v0||^2 + mu * phi(v)` by subgradient descent with step
/// `1 / sqrt(t)` at step `t = 1, 2, ...`, returning the best iterate seen.
/// A zero group contributes the zero subgradient.
pub fn ogs_prox_subgradient(v0: &Image, spec: GroupSpec, mu: f64, steps: usize) -> Image {
    assert!(v0.n() <= MAX_SUBGRADIENT_SIDE, "subgradient oracle is limited to tiny images");
    let n = v0.n();
    let groups: Vec<Vec<usize>> = (0..n * n)
        .map(|l| {
            group_entries(v0, spec, l % n, l / n).into_iter().map(|(i, j)| j * n + i).collect()
        })
        .collect();
    let target = v0.data();
    let objective = |v: &[f64]| -> f64 {
        let fit: f64 = v.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum();
        let pen: f64 = groups.iter().map(|g| g.iter().map(|&l| v[l] * v[l]).sum::<f64>().sqrt()).sum();
        0.5 * fit + mu * pen
    };

    let mut v = target.to_vec();
    let mut best = v.clone();
    let mut best_val = objective(&v);
    let mut grad = vec![0.0; n * n];
    for t in 1..=steps {
        for (gl, (x, y)) in grad.iter_mut().zip(v.iter().zip(target)) {
            *gl = x - y;
        }
        for g in &groups {
            let norm = g.iter().map(|&l| v[l] * v[l]).sum::<f64>().sqrt();
            if norm > 0.0 {
                for &l in g {
                    grad[l] += mu * v[l] / norm;
                }
            }
        }
        let step = 1.0 / (t as f64).sqrt();
        for (x, d) in v.iter_mut().zip(&grad) {
            *x -= step * d;
        }
        let val = objective(&v);
        if val < best_val {
            best_val = val;
            best.copy_from_slice(&v);
        }
    }
    Image::from_vec(n, best)
}

/// Solves the same proximal problem through its dual,
/// `max_y 1/2 ||v0||^2 - 1/2 ||v0 - A'y||^2` subject to `||y_g|| <= mu` per group,
/// where `A'y` scatters each group's dual vector back onto its pixels. Runs
/// accelerated projected gradient (step `1 / K^2`) until the duality gap is below
/// `gap_tol` or `max_iter` is reached, and returns the primal point `v0 - A'y`
/// with the final gap.
pub fn ogs_prox_dual(v0: &Image, spec: GroupSpec, mu: f64, gap_tol: f64, max_iter: usize) -> (Image, f64) {
    assert!(v0.n() <= MAX_SUBGRADIENT_SIDE, "dual oracle is limited to tiny images");
    let n = v0.n();
    let groups: Vec<Vec<usize>> = (0..n * n)
        .map(|l| group_entries(v0, spec, l % n, l / n).into_iter().map(|(i, j)| j * n + i).collect())
        .collect();
    let target = v0.data();
    let primal = |y: &[Vec<f64>]| -> Vec<f64> {
        let mut v = target.to_vec();
        for (g, yg) in groups.iter().zip(y) {
            for (&l, &val) in g.iter().zip(yg) {
                v[l] -= val;
            }
        }
        v
    };
    let gap = |v: &[f64]| -> f64 {
        let fit: f64 = v.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum();
        let pen: f64 = groups.iter().map(|g| g.iter().map(|&l| v[l] * v[l]).sum::<f64>().sqrt()).sum();
        let dual = 0.5 * target.iter().map(|x| x * x).sum::<f64>() - 0.5 * v.iter().map(|x| x * x).sum::<f64>();
        0.5 * fit + mu * pen - dual
    };
    let project = |yg: &mut Vec<f64>| {
        let norm = yg.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > mu {
            yg.iter_mut().for_each(|x| *x *= mu / norm);
        }
    };

    let step = 1.0 / (spec.size() * spec.size()) as f64;
    let mut y: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut extrapolated = y.clone();
    let mut t = 1.0f64;
    let mut v = primal(&y);
    let mut current_gap = gap(&v);
    for _ in 0..max_iter {
        if current_gap <= gap_tol {
            break;
        }
        // gradient of 1/2 ||v0 - A'y||^2 with respect to y_g is -(v0 - A'y)_g
        let w = primal(&extrapolated);
        let mut next = extrapolated.clone();
        for (g, yg) in groups.iter().zip(next.iter_mut()) {
            for (val, &l) in yg.iter_mut().zip(g) {
                *val += step * w[l];
            }
            project(yg);
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for ((e, yn), yo) in extrapolated.iter_mut().zip(&next).zip(&y) {
            for ((ev, &a), &b) in e.iter_mut().zip(yn).zip(yo) {
                *ev = a + momentum * (a - b);
            }
        }
        y = next;
        t = t_next;
        v = primal(&y);
        current_gap = gap(&v);
    }
    (Image::from_vec(n, v), current_gap)
}

/// Model objective `1/2 ||g - H f||^2 + alpha (phi(Dx f) + phi(Dy f))` with dense operators.
pub fn objective_dense(f: &Image, g: &Image, k: &Kernel, alpha: f64, spec: GroupSpec) -> Result<f64> {
    let n = f.n();
    let h = dense_from_kernel(k, n)?;
    let residual = g.sub(&h.apply(f));
    let dx = dense_grad_x(n)?.apply(f);
    let dy = dense_grad_y(n)?.apply(f);
    Ok(0.5 * residual.norm_sq() + alpha * (ogs_value_naive(&dx, spec) + ogs_value_naive(&dy, spec)))
}

/// Largest side accepted by [`atv_subgradient`].
pub const MAX_ATV_SIDE: usize = 6;

/// Projected subgradient descent on the anisotropic-TV model
/// `1/2 ||g - H f||^2 + alpha (||Dx f||_1 + ||Dy f||_1)` over the box, with
/// normalized steps `radius / sqrt(t)`. Returns the best iterate and its objective.
pub fn atv_subgradient(
    g: &Image,
    k: &Kernel,
    alpha: f64,
    bounds: BoxBounds,
    radius: f64,
    steps: usize,
) -> Result<(Image, f64)> {
    let n = g.n();
    if n > MAX_ATV_SIDE {
        return Err(Error::InvalidParameter(format!("subgradient oracle limited to n <= {MAX_ATV_SIDE}")));
    }
    let h = dense_from_kernel(k, n)?.matrix;
    let dx = dense_grad_x(n)?.matrix;
    let dy = dense_grad_y(n)?.matrix;
    let gv = to_vector(g);
    let value = |f: &DVector<f64>| {
        0.5 * (&gv - &h * f).norm_squared() + alpha * ((&dx * f).lp_norm(1) + (&dy * f).lp_norm(1))
    };
    let clamp = |f: &mut DVector<f64>| f.iter_mut().for_each(|x| *x = x.clamp(bounds.lower(), bounds.upper()));

    let mut f = gv.clone();
    clamp(&mut f);
    let mut best = (value(&f), f.clone());
    for t in 1..=steps {
        let sub = h.transpose() * (&h * &f - &gv)
            + (dx.transpose() * (&dx * &f).map(f64::signum) + dy.transpose() * (&dy * &f).map(f64::signum)) * alpha;
        let norm = sub.norm();
        if norm == 0.0 {
            break;
        }
        f -= sub * (radius / (t as f64).sqrt() / norm);
        clamp(&mut f);
        let current = value(&f);
        if current < best.0 {
            best = (current, f.clone());
        }
    }
    Ok((Image::from_vec(n, best.1.as_slice().to_vec()), best.0))
}
