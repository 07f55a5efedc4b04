//! ADMM restoration for the model
//!
//! ```text
//! min_f 1/2 ||g - H f||^2 + alpha (phi(Dx f) + phi(Dy f)),   f in [lower, upper]
//! ```
//!
//! where `phi` is the overlapping-group penalty of [`crate::ogs`]. The problem is
//! split with `v_x = Dx f`, `v_y = Dy f` and `z = f`, and each outer iteration
//! runs, in order:
//!
//! 1. an exact `f` update by solving the normal equations
//!    `(H'H + sigma Dx'Dx + sigma Dy'Dy + sigma I) f = H'g + sigma Dx'(v_x - b1) + sigma Dy'(v_y - b2) + sigma (z - b3)`
//!    in the Fourier domain (every matrix is BCCB under periodic boundaries);
//! 2. `v_x` and `v_y` updates by a few MM steps on the group-sparse prox with
//!    weight `alpha / sigma`;
//! 3. `z = clamp(f + b3)`;
//! 4. scaled dual ascent `b += dual_step * (constraint residual)`.
//!
//! Iteration stops once the relative change of the objective drops below
//! `eps_outer`, or after `max_iter` iterations.

use std::fmt::Write as _;
use std::time::Instant;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Fft2, Spectrum};
use crate::image::{project_box, BoxBounds, Image};
use crate::kernel::Kernel;
use crate::metrics::{psnr, MAX_8BIT};
use crate::ogs::{ogs_prox_mm, ogs_value, GroupSpec, MmConfig, DEFAULT_EPS_FLOOR};
use crate::operators::{
    apply_psf_periodic, grad_x, grad_x_spectrum, grad_y, grad_y_spectrum, psf_spectrum_with,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Regularization weight.
    pub alpha: f64,
    /// Augmented-Lagrangian penalty.
    pub sigma: f64,
    pub group: GroupSpec,
    /// MM updates per `v` subproblem.
    pub inner_iterations: usize,
    pub inner_tol: f64,
    pub eps_floor: f64,
    pub bounds: BoxBounds,
    /// Tolerance on the relative objective change.
    pub eps_outer: f64,
    pub max_iter: usize,
    /// Multiplier on the constraint residual in the dual update.
    pub dual_step: f64,
    /// When set, PSNR against this image is logged every iteration.
    pub reference: Option<Image>,
}

impl SolverConfig {
    /// Defaults: `sigma = alpha / 3`, `K = 3`, 5 MM steps, box `[0, 255]`,
    /// `eps_outer = 1e-5`, at most 500 iterations, unit dual step.
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            sigma: alpha / 3.0,
            group: GroupSpec::default(),
            inner_iterations: 5,
            inner_tol: 0.0,
            eps_floor: DEFAULT_EPS_FLOOR,
            bounds: BoxBounds::eight_bit(),
            eps_outer: 1e-5,
            max_iter: 500,
            dual_step: 1.0,
            reference: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_group(mut self, group: GroupSpec) -> Self {
        self.group = group;
        self
    }

    pub fn with_inner_iterations(mut self, n: usize) -> Self {
        self.inner_iterations = n;
        self
    }

    pub fn with_bounds(mut self, bounds: BoxBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_eps_outer(mut self, eps: f64) -> Self {
        self.eps_outer = eps;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_dual_step(mut self, step: f64) -> Self {
        self.dual_step = step;
        self
    }

    pub fn with_reference(mut self, reference: Image) -> Self {
        self.reference = Some(reference);
        self
    }

    /// Inner prox settings; the prox weight is `alpha / sigma`.
    pub fn mm_config(&self) -> MmConfig {
        MmConfig {
            mu: self.alpha / self.sigma,
            iterations: self.inner_iterations,
            inner_tol: self.inner_tol,
            eps_floor: self.eps_floor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha = {} must be nonnegative", self.alpha));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return bad(format!("sigma = {} must be positive", self.sigma));
        }
        if !(self.eps_outer > 0.0) {
            return bad(format!("eps_outer = {} must be positive", self.eps_outer));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.dual_step > 0.0) || !self.dual_step.is_finite() {
            return bad(format!("dual step = {} must be positive", self.dual_step));
        }
        self.mm_config().validate()
    }
}

/// Primal and scaled dual variables of one ADMM iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub f: Image,
    pub v_x: Image,
    pub v_y: Image,
    pub z: Image,
    pub b1: Image,
    pub b2: Image,
    pub b3: Image,
    pub iteration: usize,
}

impl SolverState {
    /// `f = g`, `v_x = v_y = g`, `z = clamp(g)`, zero duals.
    pub fn initial(g: &Image, bounds: BoxBounds) -> Self {
        let zero = Image::zeros(g.n());
        Self {
            f: g.clone(),
            v_x: g.clone(),
            v_y: g.clone(),
            z: project_box(g, bounds),
            b1: zero.clone(),
            b2: zero.clone(),
            b3: zero,
            iteration: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    fn fields(&self) -> [&Image; 7] {
        [&self.f, &self.v_x, &self.v_y, &self.z, &self.b1, &self.b2, &self.b3]
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|img| img.is_finite())
    }

    /// `(||Dx f - v_x||, ||Dy f - v_y||, ||f - z||)`.
    pub fn primal_residuals(&self) -> (f64, f64, f64) {
        (
            grad_x(&self.f).sub(&self.v_x).norm(),
            grad_y(&self.f).sub(&self.v_y).norm(),
            self.f.sub(&self.z).norm(),
        )
    }
}

/// `1/2 ||g - H f||^2 + alpha (phi(Dx f) + phi(Dy f))`.
pub fn objective(f: &Image, g: &Image, k: &Kernel, cfg: &SolverConfig) -> Result<f64> {
    f.ensure_same_size(g)?;
    let residual = g.sub(&apply_psf_periodic(f, k)?);
    let penalty = if cfg.alpha == 0.0 {
        0.0
    } else {
        cfg.alpha * (ogs_value(&grad_x(f), cfg.group) + ogs_value(&grad_y(f), cfg.group))
    };
    Ok(0.5 * residual.norm_sq() + penalty)
}

/// Precomputed Fourier-domain data for the `f` update.
#[derive(Debug, Clone)]
pub struct FSubproblem {
    fft: Fft2,
    blur: Spectrum,
    dx: Spectrum,
    dy: Spectrum,
    sigma: f64,
    /// `conj(H^) * g^`.
    blur_adj_g: Vec<Complex64>,
    /// `|H^|^2 + sigma |Dx^|^2 + sigma |Dy^|^2 + sigma`, strictly positive.
    denominator: Vec<f64>,
}

impl FSubproblem {
    pub fn new(g: &Image, k: &Kernel, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
        }
        let fft = Fft2::new(g.n());
        let blur = psf_spectrum_with(&fft, k)?;
        let dx = grad_x_spectrum(&fft);
        let dy = grad_y_spectrum(&fft);
        let g_hat = fft.forward(g);
        let blur_adj_g = blur.values().iter().zip(&g_hat).map(|(h, x)| h.conj() * x).collect();
        let denominator = blur
            .values()
            .iter()
            .zip(dx.values().iter().zip(dy.values()))
            .map(|(h, (a, b))| h.norm_sqr() + sigma * (a.norm_sqr() + b.norm_sqr() + 1.0))
            .collect();
        Ok(Self { fft, blur, dx, dy, sigma, blur_adj_g, denominator })
    }

    pub fn n(&self) -> usize {
        self.fft.n()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn blur_spectrum(&self) -> &Spectrum {
        &self.blur
    }

    /// Solves for `f` given the splitting variables and duals of `state`.
    pub fn solve(&self, state: &SolverState) -> Result<Image> {
        Ok(self.solve_with_residue(state)?.0)
    }

    /// Also returns the largest imaginary part discarded by the inverse transform.
    pub fn solve_with_residue(&self, state: &SolverState) -> Result<(Image, f64)> {
        for img in state.fields() {
            if img.n() != self.n() {
                return Err(Error::SizeMismatch(self.n(), img.n()));
            }
        }
        let s = self.sigma;
        let px = self.fft.forward(&state.v_x.sub(&state.b1));
        let py = self.fft.forward(&state.v_y.sub(&state.b2));
        let pz = self.fft.forward(&state.z.sub(&state.b3));
        let rhs: Vec<Complex64> = (0..self.n() * self.n())
            .map(|l| {
                let num = self.blur_adj_g[l]
                    + s * (self.dx.values()[l].conj() * px[l]
                        + self.dy.values()[l].conj() * py[l]
                        + pz[l]);
                num / self.denominator[l]
            })
            .collect();
        Ok(self.fft.inverse_real(rhs))
    }
}

/// One-shot `f` update; builds the Fourier data each call.
pub fn solve_f_subproblem(g: &Image, k: &Kernel, state: &SolverState, sigma: f64) -> Result<Image> {
    FSubproblem::new(g, k, sigma)?.solve(state)
}

/// Restoration problem with its precomputed transforms.
#[derive(Debug, Clone)]
pub struct AdmmSolver<'a> {
    g: &'a Image,
    kernel: &'a Kernel,
    cfg: &'a SolverConfig,
    f_problem: FSubproblem,
}

impl<'a> AdmmSolver<'a> {
    pub fn new(g: &'a Image, kernel: &'a Kernel, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if let Some(reference) = &cfg.reference {
            g.ensure_same_size(reference)?;
        }
        let f_problem = FSubproblem::new(g, kernel, cfg.sigma)?;
        Ok(Self { g, kernel, cfg, f_problem })
    }

    pub fn objective(&self, f: &Image) -> Result<f64> {
        objective(f, self.g, self.kernel, self.cfg)
    }

    /// One full outer iteration.
    pub fn step(&self, state: &SolverState) -> Result<SolverState> {
        let cfg = self.cfg;
        let mm = cfg.mm_config();
        let f = self.f_problem.solve(state)?;
        let fx = grad_x(&f);
        let fy = grad_y(&f);
        let v_x = prox_or_identity(&fx.add(&state.b1), cfg.group, &mm);
        let v_y = prox_or_identity(&fy.add(&state.b2), cfg.group, &mm);
        let z = project_box(&f.add(&state.b3), cfg.bounds);
        let t = cfg.dual_step;
        let b1 = state.b1.add(&fx.sub(&v_x).scale(t));
        let b2 = state.b2.add(&fy.sub(&v_y).scale(t));
        let b3 = state.b3.add(&f.sub(&z).scale(t));
        Ok(SolverState { f, v_x, v_y, z, b1, b2, b3, iteration: state.iteration + 1 })
    }
}

fn prox_or_identity(v0: &Image, group: GroupSpec, mm: &MmConfig) -> Image {
    if mm.mu == 0.0 {
        v0.clone()
    } else {
        ogs_prox_mm(v0, group, mm)
    }
}

/// Single outer iteration without reusing precomputed transforms.
pub fn admm_step(state: &SolverState, g: &Image, k: &Kernel, cfg: &SolverConfig) -> Result<SolverState> {
    AdmmSolver::new(g, k, cfg)?.step(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative objective change fell below `eps_outer`.
    Tolerance,
    MaxIterations,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIterations => "max_iter",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    /// `|J_k - J_{k-1}| / |J_{k-1}|`, or the absolute change when `J_{k-1} = 0`.
    pub rel_change: f64,
    pub res_vx: f64,
    pub res_vy: f64,
    pub res_z: f64,
    pub psnr: Option<f64>,
    pub elapsed_ms: f64,
}

impl IterationRecord {
    /// Every field except the wall-clock time.
    pub fn same_values(&self, other: &Self) -> bool {
        self.iter == other.iter
            && self.objective.to_bits() == other.objective.to_bits()
            && self.rel_change.to_bits() == other.rel_change.to_bits()
            && self.res_vx.to_bits() == other.res_vx.to_bits()
            && self.res_vy.to_bits() == other.res_vy.to_bits()
            && self.res_z.to_bits() == other.res_z.to_bits()
            && self.psnr.map(f64::to_bits) == other.psnr.map(f64::to_bits)
    }
}

pub const CSV_HEADER: &str = "iter,objective,rel_change,res_vx,res_vy,res_z,psnr,time_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLog {
    pub alpha: f64,
    pub sigma: f64,
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
}

impl ConvergenceLog {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// CSV with [`CSV_HEADER`]. `psnr` is empty without a reference image and
    /// `time_ms` is empty unless `with_timing` is set, so untimed logs are
    /// reproducible byte for byte.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let psnr = r.psnr.map(|p| p.to_string()).unwrap_or_default();
            let time = if with_timing { format!("{:.3}", r.elapsed_ms) } else { String::new() };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.iter, r.objective, r.rel_change, r.res_vx, r.res_vy, r.res_z, psnr, time
            );
        }
        out
    }

    /// Equality ignoring wall-clock time.
    pub fn same_values(&self, other: &Self) -> bool {
        self.stop == other.stop
            && self.alpha.to_bits() == other.alpha.to_bits()
            && self.sigma.to_bits() == other.sigma.to_bits()
            && self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| a.same_values(b))
    }
}

/// Relative objective change with an absolute fallback at `previous == 0`.
pub fn relative_change(previous: f64, current: f64) -> f64 {
    let delta = (current - previous).abs();
    if previous == 0.0 {
        delta
    } else {
        delta / previous.abs()
    }
}

/// Runs ADMM from [`SolverState::initial`] and returns the box-projected
/// estimate with its convergence log.
pub fn restore(g: &Image, k: &Kernel, cfg: &SolverConfig) -> Result<(Image, ConvergenceLog)> {
    let (state, log) = restore_state(g, k, cfg)?;
    Ok((project_box(&state.f, cfg.bounds), log))
}

/// As [`restore`] but returns the raw final iterate.
pub fn restore_state(g: &Image, k: &Kernel, cfg: &SolverConfig) -> Result<(SolverState, ConvergenceLog)> {
    let solver = AdmmSolver::new(g, k, cfg)?;
    let start = Instant::now();
    let mut state = SolverState::initial(g, cfg.bounds);
    let initial_objective = solver.objective(&state.f)?;
    let mut previous = initial_objective;
    let mut records = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for iter in 1..=cfg.max_iter {
        state = solver.step(&state)?;
        if !state.is_finite() {
            return Err(Error::NonFinite { iteration: iter });
        }
        let current = solver.objective(&state.f)?;
        let rel_change = relative_change(previous, current);
        let (res_vx, res_vy, res_z) = state.primal_residuals();
        let psnr = cfg.reference.as_ref().map(|r| psnr(r, &state.f, MAX_8BIT));
        let record = IterationRecord {
            iter,
            objective: current,
            rel_change,
            res_vx,
            res_vy,
            res_z,
            psnr,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        let finite = [current, rel_change, res_vx, res_vy, res_z].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite { iteration: iter });
        }
        records.push(record);
        if rel_change < cfg.eps_outer {
            stop = StopReason::Tolerance;
            break;
        }
        previous = current;
    }

    let log = ConvergenceLog { alpha: cfg.alpha, sigma: cfg.sigma, initial_objective, records, stop };
    Ok((state, log))
}
