//! Hermite functions as eigenfunctions of the harmonic oscillator, and the
//! exact harmonic propagator.

use std::f64::consts::PI;

use nls_rotation::harmonic::{apply_h, propagate_shear, HermiteBasis};
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    let basis = HermiteBasis::build(g, 30)?;
    for (k, (psi, lambda)) in basis.functions().iter().zip(basis.eigenvalues()).enumerate().step_by(6) {
        let residual = apply_h(psi).sub(&psi.scale_real(*lambda))?.l2();
        println!("k = {k:2}  eigenvalue {lambda:5.1}  ||H psi - lambda psi|| = {residual:.2e}");
    }

    let f = Field::from_real_fn(g, |x| (-0.5 * (x[0] - 1.0).powi(2)).exp());
    let by_modes = basis.propagate(&f, 0.7)?;
    let by_shear = propagate_shear(&f, 0.7);
    println!("modal vs shear propagator at t = 0.7: {:.2e}", by_modes.distance(&by_shear)?);
    println!("U_H(pi) f vs -i f(-x): {:.2e}", propagate_shear(&f, PI).distance(&f.reflect().rotate(-PI / 2.0))?);
    Ok(())
}
