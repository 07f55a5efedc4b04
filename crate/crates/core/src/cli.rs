//! Command-line front end.
//!
//! Four subcommands: `degrade`, `restore`, `metrics` and `kernel`. Results go to
//! standard output as `key=value` lines. Exit codes: 0 success, 1 usage or
//! invalid input, 2 I/O or file-format failure, 3 numeric failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand};

use crate::error::Error;
use crate::image::BoxBounds;
use crate::kernel::KernelSpec;
use crate::metrics::{bsnr, noise_std_for_bsnr, psnr, rel_err};
use crate::ogs::GroupSpec;
use crate::operators::{apply_psf_periodic, degrade_parts};
use crate::pgm::{load_pgm, save_pgm};
use crate::solver::{restore, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ogstv", version, about = "Overlapping-group-sparsity TV image restoration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Blur an image and add seeded Gaussian noise.
    #[command(group(ArgGroup::new("noise").required(true).args(["noise_std", "bsnr"])))]
    Degrade {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// gaussian:SIZE:STD | average:SIZE | identity | file:PATH
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long)]
        noise_std: Option<f64>,
        /// Target blurred signal-to-noise ratio in dB.
        #[arg(long)]
        bsnr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Restore a degraded image.
    Restore {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long)]
        alpha: f64,
        /// Defaults to alpha / 3.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 3)]
        group_size: usize,
        #[arg(long, default_value_t = 5)]
        inner_iters: usize,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// LO:HI
        #[arg(long = "box", default_value = "0:255", value_parser = parse_box)]
        bounds: BoxBounds,
        #[arg(long, default_value_t = 1.0)]
        dual_step: f64,
        /// Clean image; enables PSNR tracking and the final quality report.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Convergence log destination (CSV).
        #[arg(long)]
        log: Option<PathBuf>,
        /// Fill the time_ms column of the log with wall-clock times.
        #[arg(long)]
        timing: bool,
    },
    /// Compare an estimate against a reference image.
    Metrics {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long = "est")]
        estimate: PathBuf,
        #[arg(long, default_value_t = 255.0)]
        max_val: f64,
    },
    /// Write a kernel text file.
    Kernel {
        #[arg(long)]
        spec: KernelSpec,
        #[arg(long = "out")]
        output: PathBuf,
    },
}

fn parse_box(s: &str) -> Result<BoxBounds, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    BoxBounds::new(lo, hi).map_err(|e| e.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. }
        | Error::PgmHeader(_)
        | Error::NonSquare { .. }
        | Error::MaxvalTooLarge(_)
        | Error::PgmTruncated { .. } => EXIT_IO,
        Error::NonFinite { .. } | Error::ZeroReference | Error::ZeroNoise => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> crate::Result<()> {
    writeln!(out, "{key}={value}").map_err(|e| Error::io("<stdout>", e))
}

pub fn execute(command: Command, out: &mut dyn Write) -> crate::Result<()> {
    match command {
        Command::Degrade { input, output, kernel, noise_std, bsnr: target, seed } => {
            let clean = load_pgm(&input)?;
            let k = kernel.build()?;
            let std = match (noise_std, target) {
                (Some(s), None) => s,
                (None, Some(db)) => noise_std_for_bsnr(&apply_psf_periodic(&clean, &k)?, db)?,
                _ => return Err(Error::InvalidParameter("give exactly one of --noise-std, --bsnr".into())),
            };
            let parts = degrade_parts(&clean, &k, std, seed)?;
            save_pgm(&parts.observed, &output)?;
            let realized = match bsnr(&parts.observed, &parts.noise) {
                Ok(db) => db,
                Err(Error::ZeroNoise) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            emit(out, "noise_std", std)?;
            emit(out, "bsnr_db", realized)?;
            emit(out, "seed", seed)?;
        }
        Command::Restore {
            input,
            output,
            kernel,
            alpha,
            sigma,
            group_size,
            inner_iters,
            eps,
            max_iter,
            bounds,
            dual_step,
            reference,
            log,
            timing,
        } => {
            if !(alpha > 0.0) {
                return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
            }
            let g = load_pgm(&input)?;
            let k = kernel.build()?;
            let mut cfg = SolverConfig::new(alpha)
                .with_group(GroupSpec::new(group_size)?)
                .with_inner_iterations(inner_iters)
                .with_eps_outer(eps)
                .with_max_iter(max_iter)
                .with_bounds(bounds)
                .with_dual_step(dual_step);
            if let Some(s) = sigma {
                cfg = cfg.with_sigma(s);
            }
            let clean = reference.as_ref().map(load_pgm).transpose()?;
            if let Some(c) = &clean {
                cfg = cfg.with_reference(c.clone());
            }
            let (restored, convergence) = restore(&g, &k, &cfg)?;
            save_pgm(&restored, &output)?;
            if let Some(path) = &log {
                fs::write(path, convergence.to_csv(timing)).map_err(|e| Error::io(path, e))?;
            }
            emit(out, "alpha", cfg.alpha)?;
            emit(out, "sigma", cfg.sigma)?;
            emit(out, "iterations", convergence.iterations())?;
            emit(out, "stop", convergence.stop.as_str())?;
            if let Some(last) = convergence.last() {
                emit(out, "objective", last.objective)?;
                emit(out, "rel_change", last.rel_change)?;
            }
            if let Some(c) = &clean {
                emit(out, "psnr_db", psnr(c, &restored, 255.0))?;
                emit(out, "rel_err", rel_err(c, &restored)?)?;
            }
        }
        Command::Metrics { reference, estimate, max_val } => {
            let r = load_pgm(&reference)?;
            let e = load_pgm(&estimate)?;
            if r.n() != e.n() {
                return Err(Error::SizeMismatch(r.n(), e.n()));
            }
            emit(out, "psnr_db", psnr(&r, &e, max_val))?;
            emit(out, "rel_err", rel_err(&r, &e)?)?;
        }
        Command::Kernel { spec, output } => {
            let k = spec.build()?;
            k.save(&output)?;
            emit(out, "rows", k.rows())?;
            emit(out, "cols", k.cols())?;
            emit(out, "sum", k.sum())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("ogstv").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["kernel", "--spec", "identity", "--out", "x", "--unknown", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["kernel", "--spec", "gauss:3", "--out", "x"]).0, EXIT_USAGE);
        let (code, _, _) = run_args(&[
            "degrade", "--in", "a", "--out", "b", "--kernel", "identity", "--noise-std", "1", "--bsnr", "40",
        ]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_args(&["degrade", "--in", "a", "--out", "b", "--kernel", "identity"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn missing_input_is_io_error() {
        let (code, _, err) = run_args(&[
            "metrics", "--ref", "/nonexistent/a.pgm", "--est", "/nonexistent/b.pgm",
        ]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("error:"));
    }

    #[test]
    fn box_parsing() {
        assert_eq!(parse_box("0:255").unwrap(), BoxBounds::eight_bit());
        assert!(parse_box("5:5").is_err());
        assert!(parse_box("0-255").is_err());
        assert!(parse_box("a:1").is_err());
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::NonFinite { iteration: 4 }), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::MaxvalTooLarge(300)), EXIT_IO);
        assert_eq!(exit_code(&Error::InvalidKernel("x".into())), EXIT_USAGE);
    }
}
