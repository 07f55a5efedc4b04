// The overlapping-group-sparsity proximal step on its own: watch the
// majorization-minimization iterates decrease the objective, and compare the
// group size 1 case with plain soft thresholding.

use ogstv::ogs::{ogs_prox_mm_observed, prox_objective};
use ogstv::{grad_x, ogs_prox_mm, phantom, GroupSpec, Image, MmConfig};

pub fn run_example() -> ogstv::Result<Vec<f64>> {
    let img = phantom::piecewise_constant(32, 3);
    let noisy = img.add(&ogstv::noise::gaussian_field(32, 10.0, 5));
    let v0 = grad_x(&noisy);
    let spec = GroupSpec::new(3)?;
    let mu = 8.0;

    let mut trace = vec![prox_objective(&v0, &v0, spec, mu)];
    let cfg = MmConfig::new(mu).with_iterations(20);
    let v = ogs_prox_mm_observed(&v0, spec, &cfg, |_, v| trace.push(prox_objective(v, &v0, spec, mu)));
    for (k, r) in trace.iter().enumerate().step_by(4) {
        println!("MM step {k:>2}: R = {r:.3}");
    }
    let shrunk = v.data().iter().filter(|x| x.abs() < 0.5).count();
    println!("{shrunk} of {} gradient entries pushed below 0.5", v.len());

    let samples = Image::new(2, vec![3.0, -0.5, 2.5, -4.0])?;
    let soft = ogs_prox_mm(&samples, GroupSpec::new(1)?, &MmConfig::new(1.0).with_iterations(100));
    println!("K=1 prox of {:?} -> {:?}", samples.data(), soft.data());
    Ok(trace)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
