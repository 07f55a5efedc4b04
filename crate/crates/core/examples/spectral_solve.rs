// The quadratic f-update solved in the Fourier domain, checked against a
// dense Cholesky solve of the same normal equations.

use ogstv::oracle::{dense_solve_f, FSubproblemData};
use ogstv::solver::FSubproblem;
use ogstv::{phantom, Kernel, SolverState};

pub fn run_example() -> ogstv::Result<f64> {
    let g = phantom::piecewise_constant(8, 2);
    let blur = Kernel::average(3)?;
    let mut state = SolverState::initial(&g, Default::default());
    state.v_x = g.map(|v| 0.1 * v);
    state.b3 = g.map(|v| (v / 40.0).sin());

    let mut worst = 0.0f64;
    for sigma in [0.01, 1.0, 100.0] {
        let fast = FSubproblem::new(&g, &blur, sigma)?.solve(&state)?;
        let data = FSubproblemData {
            g: &g,
            v_x: &state.v_x,
            v_y: &state.v_y,
            z: &state.z,
            b1: &state.b1,
            b2: &state.b2,
            b3: &state.b3,
        };
        let dense = dense_solve_f(&blur, &data, sigma)?;
        let rel = fast.sub(&dense).norm() / dense.norm();
        println!("sigma={sigma:<6} relative difference {rel:.2e}");
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
