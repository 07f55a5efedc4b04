//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line for
//! each and exits non-zero if any failed.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ogstv::cli;
use ogstv::ogs::{majorizer_value, ogs_prox_mm_observed, prox_objective};
use ogstv::oracle::{self, FSubproblemData};
use ogstv::solver::FSubproblem;
use ogstv::{
    apply_psf_periodic, degrade, grad_x, grad_x_adjoint, grad_y, grad_y_adjoint, mm_weights, noise_std_for_bsnr,
    ogs_prox_mm, phantom, psnr, restore, save_pgm, ConvergenceLog, GroupSpec, Image, Kernel, MmConfig,
    SolverConfig, SolverState, StopReason,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const EPS_OUTER: f64 = 1e-5;
const PHANTOM_SEED: u64 = 7;
const NOISE_SEED: u64 = 11;
const BLUR_NOISE_SEED: u64 = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_image(rng: &mut StdRng, n: usize, scale: f64) -> Image {
    Image::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

fn group(k: usize) -> GroupSpec {
    GroupSpec::new(k).unwrap()
}

fn rel_diff(a: &Image, b: &Image) -> f64 {
    a.sub(b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Runs within `limit` wall-clock time and with `pass` set.
fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = body();
    let elapsed = start.elapsed();
    if elapsed > limit {
        out.pass = false;
    }
    out.detail = format!("{} [{:.2}s, limit {}s]", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    out
}

fn adjoint() -> Outcome {
    let mut rng = StdRng::seed_from_u64(100);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let u = random_image(&mut rng, 16, 10.0);
        let w = random_image(&mut rng, 16, 10.0);
        let scale = u.norm() * w.norm();
        let ex = (grad_x(&u).dot(&w) - u.dot(&grad_x_adjoint(&w))).abs() / scale;
        let ey = (grad_y(&u).dot(&w) - u.dot(&grad_y_adjoint(&w))).abs() / scale;
        worst = worst.max(ex).max(ey);
    }
    Outcome { pass: worst <= 1e-10, detail: format!("worst scaled gap {worst:.2e} (tol 1e-10)") }
}

fn spectral_vs_dense() -> Outcome {
    let kernels = [Kernel::identity(), Kernel::gaussian(3, 1.0).unwrap(), Kernel::average(3).unwrap()];
    let sigmas = [0.01, 1.0, 100.0];
    let mut rng = StdRng::seed_from_u64(200);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let k = &kernels[i % 3];
        let sigma = sigmas[(i / 3) % 3];
        let g = random_image(&mut rng, 8, 100.0);
        let state = SolverState {
            f: g.clone(),
            v_x: random_image(&mut rng, 8, 30.0),
            v_y: random_image(&mut rng, 8, 30.0),
            z: random_image(&mut rng, 8, 100.0),
            b1: random_image(&mut rng, 8, 5.0),
            b2: random_image(&mut rng, 8, 5.0),
            b3: random_image(&mut rng, 8, 5.0),
            iteration: 0,
        };
        let fast = FSubproblem::new(&g, k, sigma).unwrap().solve(&state).unwrap();
        let data = FSubproblemData {
            g: &g,
            v_x: &state.v_x,
            v_y: &state.v_y,
            z: &state.z,
            b1: &state.b1,
            b2: &state.b2,
            b3: &state.b3,
        };
        let dense = oracle::dense_solve_f(k, &data, sigma).unwrap();
        worst = worst.max(rel_diff(&fast, &dense));
    }
    Outcome { pass: worst <= 1e-8, detail: format!("worst relative error {worst:.2e} (tol 1e-8)") }
}

fn majorization() -> Outcome {
    let mut rng = StdRng::seed_from_u64(300);
    let (mut worst_bound, mut worst_touch) = (f64::INFINITY, 0.0f64);
    for i in 0..100 {
        let spec = group(1 + i % 3);
        let n = rng.random_range(3..=8);
        let v0 = random_image(&mut rng, n, 20.0);
        let v = random_image(&mut rng, n, 20.0);
        let u = random_image(&mut rng, n, 20.0);
        let mu = rng.random_range(0.1..5.0);
        let r_v = prox_objective(&v, &v0, spec, mu);
        let r_u = prox_objective(&u, &v0, spec, mu);
        worst_bound = worst_bound.min(majorizer_value(&v, &u, &v0, spec, mu, 1e-12) - r_v);
        worst_touch = worst_touch.max((majorizer_value(&u, &u, &v0, spec, mu, 1e-12) - r_u).abs());
    }
    Outcome {
        pass: worst_bound >= -1e-9 && worst_touch <= 1e-9,
        detail: format!("min Q(v,u)-R(v) {worst_bound:.2e}, max |Q(u,u)-R(u)| {worst_touch:.2e} (tol 1e-9)"),
    }
}

fn mm_descent() -> Outcome {
    let mut rng = StdRng::seed_from_u64(400);
    let mut worst = f64::NEG_INFINITY;
    let mut steps = 0;
    for i in 0..20 {
        let spec = group(1 + i % 3);
        let n = rng.random_range(4..=12);
        let v0 = random_image(&mut rng, n, 50.0);
        let mu = rng.random_range(0.5..20.0);
        let mut previous = prox_objective(&v0, &v0, spec, mu);
        let cfg = MmConfig::new(mu).with_iterations(50);
        ogs_prox_mm_observed(&v0, spec, &cfg, |_, v| {
            let current = prox_objective(v, &v0, spec, mu);
            worst = worst.max(current - previous);
            previous = current;
            steps += 1;
        });
    }
    Outcome { pass: worst <= 1e-10, detail: format!("{steps} steps, largest increase {worst:.2e} (tol 1e-10)") }
}

fn prox_oracle() -> Outcome {
    // Unit-scale instances: the objective is homogeneous of degree two in
    // (v0, mu), so an absolute tolerance only means something at a fixed scale.
    let mut rng = StdRng::seed_from_u64(500);
    let (mut worst, mut worst_rel, mut worst_gap) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..20 {
        let spec = group(2 + i % 2);
        let v0 = random_image(&mut rng, 4, 1.0);
        let mu = rng.random_range(0.1..1.0);
        let mm = ogs_prox_mm(&v0, spec, &MmConfig::new(mu).with_iterations(300));
        let (best, gap) = oracle::ogs_prox_dual(&v0, spec, mu, 1e-12, 500_000);
        let optimum = prox_objective(&best, &v0, spec, mu);
        let diff = (prox_objective(&mm, &v0, spec, mu) - optimum).abs();
        worst_gap = worst_gap.max(gap);
        worst = worst.max(diff);
        worst_rel = worst_rel.max(diff / optimum);
    }
    // K = 1: entries at least 10% of mu away from the threshold itself.
    let mut worst_soft = 0.0f64;
    for _ in 0..20 {
        let mu = rng.random_range(0.1..1.0);
        let v0 = Image::from_fn(4, |_, _| loop {
            let x: f64 = rng.random_range(-1.0..1.0);
            if (x.abs() - mu).abs() >= 0.1 * mu {
                break x;
            }
        });
        let mm = ogs_prox_mm(&v0, group(1), &MmConfig::new(mu).with_iterations(300));
        for (x, y) in mm.data().iter().zip(v0.data()) {
            worst_soft = worst_soft.max((x - y.signum() * (y.abs() - mu).max(0.0)).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-4 && worst_gap <= 1e-10 && worst_soft <= 1e-4,
        detail: format!(
            "K=2,3 objective gap {worst:.2e} (relative {worst_rel:.1e}, oracle duality gap {worst_gap:.1e}); \
             K=1 soft-threshold error {worst_soft:.2e} (tol 1e-4)"
        ),
    }
}

fn lambda_weights() -> Outcome {
    let mut rng = StdRng::seed_from_u64(600);
    let mut worst = 0.0f64;
    for k in 1..=3 {
        for _ in 0..10 {
            let u = random_image(&mut rng, 5, 10.0);
            let fast = mm_weights(&u, group(k), 1e-12);
            let naive = oracle::mm_weights_naive(&u, group(k), 1e-12);
            worst = worst.max(fast.max_abs_diff(&naive));
        }
    }
    let ones = mm_weights(&Image::filled(7, 1.0), group(3), 0.0);
    let hand = (ones.get(3, 3) - 3f64.sqrt()).abs();
    Outcome {
        pass: worst <= 1e-12 && hand <= 1e-12,
        detail: format!("fast vs naive {worst:.2e}, interior sqrt(3) error {hand:.2e} (tol 1e-12)"),
    }
}

fn denoising(logs: &mut Vec<ConvergenceLog>) -> Outcome {
    let clean = phantom::piecewise_constant(64, PHANTOM_SEED);
    let id = Kernel::identity();
    let noisy = degrade(&clean, &id, 15.0, NOISE_SEED).unwrap();
    let before = psnr(&clean, &noisy, 255.0);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for alpha in [1.0, 5.0, 10.0, 20.0] {
        let (restored, log) = restore(&noisy, &id, &SolverConfig::new(alpha)).unwrap();
        let p = psnr(&clean, &restored, 255.0);
        if p > best.0 {
            best = (p, alpha);
        }
        logs.push(log);
    }
    let gain = best.0 - before;
    Outcome {
        pass: gain >= 2.0,
        detail: format!("noisy {before:.2} dB, best {:.2} dB at alpha={}, gain {gain:.2} dB (need 2)", best.0, best.1),
    }
}

fn deblur_instance() -> (Image, Kernel, Image) {
    let clean = phantom::piecewise_constant(64, PHANTOM_SEED);
    let blur = Kernel::gaussian(7, 2.0).unwrap();
    let std = noise_std_for_bsnr(&apply_psf_periodic(&clean, &blur).unwrap(), 40.0).unwrap();
    let observed = degrade(&clean, &blur, std, BLUR_NOISE_SEED).unwrap();
    (clean, blur, observed)
}

fn deblurring(logs: &mut Vec<ConvergenceLog>) -> Outcome {
    let (clean, blur, observed) = deblur_instance();
    let before = psnr(&clean, &observed, 255.0);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for alpha in [0.05, 0.1, 0.5, 1.0] {
        let (restored, log) = restore(&observed, &blur, &SolverConfig::new(alpha)).unwrap();
        let p = psnr(&clean, &restored, 255.0);
        if p > best.0 {
            best = (p, alpha);
        }
        logs.push(log);
    }
    let gain = best.0 - before;
    Outcome {
        pass: gain >= 1.0,
        detail: format!("observed {before:.2} dB, best {:.2} dB at alpha={}, gain {gain:.2} dB (need 1)", best.0, best.1),
    }
}

fn inner_iteration_trend(logs: &mut Vec<ConvergenceLog>) -> Outcome {
    let (clean, blur, observed) = deblur_instance();
    let mut run = |n: usize| {
        let cfg = SolverConfig::new(0.1).with_inner_iterations(n);
        let (restored, log) = restore(&observed, &blur, &cfg).unwrap();
        logs.push(log);
        psnr(&clean, &restored, 255.0)
    };
    let (p1, p5, p20) = (run(1), run(5), run(20));
    Outcome {
        pass: (p5 - p20).abs() <= 0.2 && p1 <= p5 + 0.05,
        detail: format!("PSNR N=1 {p1:.3}, N=5 {p5:.3}, N=20 {p20:.3} dB"),
    }
}

fn stopping(logs: &[ConvergenceLog]) -> Outcome {
    let mut logs = logs.to_vec();
    let (_, blur, observed) = deblur_instance();
    let capped = SolverConfig::new(0.1).with_max_iter(3);
    logs.push(restore(&observed, &blur, &capped).unwrap().1);

    let mut violations = 0;
    let (mut tolerance, mut capped_runs) = (0, 0);
    for log in &logs {
        let last = log.last().expect("at least one iteration");
        let ok = match log.stop {
            StopReason::Tolerance => {
                tolerance += 1;
                last.rel_change < EPS_OUTER
            }
            StopReason::MaxIterations => {
                capped_runs += 1;
                log.iterations() == 500 || log.iterations() == 3
            }
        };
        let finite = log.records.iter().all(|r| r.objective.is_finite() && r.rel_change.is_finite());
        if !ok || !finite {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0 && capped_runs >= 1,
        detail: format!("{} runs: {tolerance} tolerance, {capped_runs} max_iter, {violations} violations", logs.len()),
    }
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("ogstv").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    save_pgm(&phantom::piecewise_constant(48, PHANTOM_SEED), path("clean.pgm")).unwrap();

    let mut artifacts = Vec::new();
    for round in 0..2 {
        let degraded = path(&format!("g{round}.pgm"));
        let restored = path(&format!("f{round}.pgm"));
        let log = path(&format!("log{round}.csv"));
        let (c1, o1) = run_cli(&[
            "degrade", "--in", &path("clean.pgm"), "--out", &degraded, "--kernel", "gaussian:7:2", "--bsnr", "40",
            "--seed", "3",
        ]);
        let (c2, o2) = run_cli(&[
            "restore", "--in", &degraded, "--out", &restored, "--kernel", "gaussian:7:2", "--alpha", "0.1", "--ref",
            &path("clean.pgm"), "--log", &log,
        ]);
        assert_eq!((c1, c2), (0, 0), "cli failed");
        artifacts.push([
            fs::read(&degraded).unwrap(),
            fs::read(&restored).unwrap(),
            fs::read(&log).unwrap(),
            o1.into_bytes(),
            o2.into_bytes(),
        ]);
    }
    let identical = artifacts[0] == artifacts[1];
    Outcome {
        pass: identical,
        detail: format!("degraded PGM, restored PGM, CSV log and reports identical: {identical}"),
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut logs = Vec::new();
    let results = [
        ("AC1 adjoint correctness", timed(secs(1), adjoint)),
        ("AC2 spectral vs dense f-subproblem", timed(secs(5), spectral_vs_dense)),
        ("AC3 majorization", timed(secs(5), majorization)),
        ("AC4 MM descent", timed(secs(5), mm_descent)),
        ("AC5 prox oracle equivalence", timed(secs(30), prox_oracle)),
        ("AC6 Lambda weights literal check", timed(secs(2), lambda_weights)),
        ("AC7 denoising improvement", timed(secs(30), || denoising(&mut logs))),
        ("AC8 deblurring improvement", timed(secs(60), || deblurring(&mut logs))),
        ("AC9 inner-iteration trend", timed(secs(120), || inner_iteration_trend(&mut logs))),
        ("AC10 stopping contract", timed(secs(60), || stopping(&logs))),
        ("AC11 determinism", timed(secs(60), determinism)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
