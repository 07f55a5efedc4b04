// Denoise a phantom corrupted by Gaussian noise, sweeping the
// regularization weight.

use ogstv::{degrade, phantom, psnr, restore, Kernel, SolverConfig};

pub fn run_example() -> ogstv::Result<f64> {
    let clean = phantom::piecewise_constant(64, 7);
    let id = Kernel::identity();
    let noisy = degrade(&clean, &id, 15.0, 11)?;
    println!("noisy      PSNR {:.2} dB", psnr(&clean, &noisy, 255.0));

    let mut best = f64::NEG_INFINITY;
    for alpha in [1.0, 5.0, 10.0, 20.0] {
        let (restored, log) = restore(&noisy, &id, &SolverConfig::new(alpha))?;
        let p = psnr(&clean, &restored, 255.0);
        println!("alpha={alpha:<4} PSNR {p:.2} dB after {} iterations ({})", log.iterations(), log.stop.as_str());
        best = best.max(p);
    }
    Ok(best)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
