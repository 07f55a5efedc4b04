//! Grayscale image restoration with an overlapping-group-sparsity
//! anisotropic total-variation regularizer.
//!
//! The restored image minimizes
//! `1/2 ||g - H f||^2 + alpha (phi(Dx f) + phi(Dy f))` subject to a box
//! constraint, where `H` is a periodic blur, `Dx`/`Dy` are periodic forward
//! differences and `phi` sums the Euclidean norms of overlapping `K x K`
//! windows. See [`solver`] for the ADMM iteration and [`ogs`] for the inner
//! majorization-minimization prox.
//!
//! ```no_run
//! use ogstv::{degrade, phantom, restore, Kernel, SolverConfig};
//!
//! let clean = phantom::piecewise_constant(64, 1);
//! let blur = Kernel::gaussian(7, 2.0).unwrap();
//! let observed = degrade(&clean, &blur, 1.0, 42).unwrap();
//! let (restored, log) = restore(&observed, &blur, &SolverConfig::new(0.5)).unwrap();
//! println!("{} iterations, stopped on {}", log.iterations(), log.stop.as_str());
//! # let _ = restored;
//! ```

pub mod cli;
pub mod error;
pub mod fft;
pub mod image;
pub mod kernel;
pub mod metrics;
pub mod noise;
pub mod ogs;
pub mod operators;
pub mod oracle;
pub mod pgm;
pub mod phantom;
pub mod solver;

pub use error::{Error, Result};
pub use fft::{Fft2, Spectrum};
pub use image::{project_box, BoxBounds, Image};
pub use kernel::{Kernel, KernelSpec};
pub use metrics::{bsnr, noise_std_for_bsnr, psnr, rel_err, MetricReport};
pub use ogs::{group_norm_field, mm_weights, ogs_prox_mm, ogs_value, GroupSpec, MmConfig};
pub use operators::{apply_psf_periodic, degrade, grad_x, grad_x_adjoint, grad_y, grad_y_adjoint, psf_spectrum};
pub use pgm::{load_pgm, save_pgm};
pub use solver::{restore, ConvergenceLog, SolverConfig, SolverState, StopReason};
