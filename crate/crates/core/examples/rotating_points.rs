//! Defocusing rotating points: data with S(u) = exp(i theta) u built from
//! nonlinear eigenstates.

use std::f64::consts::PI;

use nls_rotation::propagator::Sign;
use nls_rotation::scattering::{self, DatumOptions};

fn main() -> nls_rotation::Result<()> {
    let opts = DatumOptions::reference(1);
    for theta in [0.0, 0.5 * PI, PI] {
        for j in 1..=2 {
            let datum = scattering::build_rotating_datum(theta, j, 1, Sign::Defocusing, &opts)?;
            let (defect, _) = scattering::rotation_defect(&datum, 1e-3)?;
            println!("theta/pi = {:.1}, j = {j}, nu = {:.2}: rotation defect {defect:.2e}", theta / PI, datum.nu);
        }
    }
    Ok(())
}
