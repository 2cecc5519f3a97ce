//! The focusing ground state and the sharp Gagliardo-Nirenberg inequality.

use nls_rotation::eigen;
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    let q = eigen::solve_q(g)?.psi;
    let exact = Field::from_real_fn(g, |x| eigen::q_closed_form_1d(x[0]));
    println!("1D: ||Q|| = {:.8} (exact {:.8}), sup error {:.1e}", q.l2(), eigen::q_mass_1d(), q.sub(&exact)?.linf());
    println!("GN ratio at Q: {:.12}", eigen::gn_check(&q, q.l2()));
    println!("GN ratio at a Gaussian: {:.6}", eigen::gn_check(&Field::gaussian(g, 1.0), q.l2()));

    let q2 = eigen::solve_q(Grid::new(2, 8.0, 128)?)?.psi;
    println!("2D: ||Q||^2 = {:.4}", q2.l2_squared());
    Ok(())
}
