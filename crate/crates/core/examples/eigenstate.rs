//! Solve the defocusing nonlinear eigenvalue problem by constrained
//! minimization.

use nls_rotation::eigen::{self, MinimizationProblem};
use nls_rotation::propagator::Sign;
use nls_rotation::spectral::{grad_l2, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    for nu in [1.5, 2.5, 4.5] {
        let problem = MinimizationProblem::new(nu, Sign::Defocusing, g);
        let sol = eigen::solve_eigenstate(&problem, eigen::DEFAULT_TOL, eigen::DEFAULT_MAX_ITER)?;
        println!(
            "nu = {nu}: {:3} iterations, residual {:.1e}, ||phi|| = {:.5}, ||grad phi|| = {:.5}, mu = {:.4}",
            sol.iterations,
            sol.residual,
            sol.psi.l2(),
            grad_l2(&sol.psi),
            sol.mu
        );
    }
    Ok(())
}
