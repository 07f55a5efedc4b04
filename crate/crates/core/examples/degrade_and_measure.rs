// Blur a synthetic phantom, add noise at a target BSNR and report the
// quality metrics of the observation.

use ogstv::operators::degrade_parts;
use ogstv::{apply_psf_periodic, bsnr, noise_std_for_bsnr, phantom, Kernel, MetricReport};

pub fn run_example() -> ogstv::Result<MetricReport> {
    let clean = phantom::piecewise_constant(128, 1);
    let blur = Kernel::gaussian(7, 2.0)?;

    let std = noise_std_for_bsnr(&apply_psf_periodic(&clean, &blur)?, 40.0)?;
    let parts = degrade_parts(&clean, &blur, std, 42)?;
    let report = MetricReport::compare(&clean, &parts.observed, 255.0)?;

    println!("noise std      {std:.4}");
    println!("realized BSNR  {:.2} dB", bsnr(&parts.observed, &parts.noise)?);
    println!("observed PSNR  {:.2} dB", report.psnr_db);
    println!("relative error {:.4}", report.rel_err);
    Ok(report)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
