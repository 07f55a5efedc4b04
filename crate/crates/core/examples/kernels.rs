// Build blur kernels from specs, write them as text and inspect their
// transfer functions.

use std::str::FromStr;

use ogstv::{psf_spectrum, Kernel, KernelSpec};

pub fn run_example() -> ogstv::Result<Vec<Kernel>> {
    let dir = std::env::temp_dir().join("ogstv-kernels-example");
    std::fs::create_dir_all(&dir).map_err(|e| ogstv::Error::Io { path: dir.clone(), source: e })?;

    let mut kernels = Vec::new();
    for spec in ["identity", "average:9", "gaussian:7:2"] {
        let k = KernelSpec::from_str(spec)?.build()?;
        let path = dir.join(format!("{}.txt", spec.replace(':', "_")));
        k.save(&path)?;
        assert_eq!(Kernel::load(&path)?, k);

        // smallest gain of the periodic blur on a 64x64 grid
        let spectrum = psf_spectrum(&k, 64)?;
        let weakest = spectrum.values().iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
        println!("{spec:<14} {}x{} sum={:.6} min|H|={weakest:.3e} -> {}", k.rows(), k.cols(), k.sum(), path.display());
        kernels.push(k);
    }
    Ok(kernels)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
