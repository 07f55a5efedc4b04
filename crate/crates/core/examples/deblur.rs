// Deblur a Gaussian-blurred phantom and print the convergence log,
// including PSNR per iteration against the known clean image.

use ogstv::{apply_psf_periodic, degrade, noise_std_for_bsnr, phantom, psnr, restore, GroupSpec, Kernel, SolverConfig};

pub fn run_example() -> ogstv::Result<(f64, f64)> {
    let clean = phantom::piecewise_constant(64, 7);
    let blur = Kernel::gaussian(7, 2.0)?;
    let std = noise_std_for_bsnr(&apply_psf_periodic(&clean, &blur)?, 40.0)?;
    let observed = degrade(&clean, &blur, std, 5)?;

    let cfg = SolverConfig::new(0.1).with_group(GroupSpec::new(3)?).with_reference(clean.clone());
    let (restored, log) = restore(&observed, &blur, &cfg)?;

    let csv = log.to_csv(false);
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    println!("... {} iterations, stopped on {}", log.iterations(), log.stop.as_str());

    let before = psnr(&clean, &observed, 255.0);
    let after = psnr(&clean, &restored, 255.0);
    println!("PSNR {before:.2} dB -> {after:.2} dB");
    Ok((before, after))
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
