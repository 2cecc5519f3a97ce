//! Focusing rotating points above the ground-state mass.

use nls_rotation::experiment::{default_dt, focusing_mass_threshold};
use nls_rotation::propagator::Sign;
use nls_rotation::scattering::{self, DatumOptions};
use nls_rotation::spectral::grad_l2;

fn main() -> nls_rotation::Result<()> {
    let threshold = focusing_mass_threshold(1)?;
    let dt = default_dt(Sign::Focusing);
    println!("mass threshold {threshold:.5}, dt = {dt:e}");
    for j in 1..=3 {
        let datum = scattering::build_rotating_datum(0.0, j, 1, Sign::Focusing, &DatumOptions::reference(1))?;
        let (defect, _) = scattering::rotation_defect(&datum, dt)?;
        let phi = &datum.eigen.psi;
        println!("j = {j}: ||phi|| = {:.4}, ||grad phi|| = {:.4}, defect {defect:.2e}", phi.l2(), grad_l2(phi));
    }
    Ok(())
}
