//! Random perturbations of a focusing rotating datum.

use nls_rotation::propagator::Sign;
use nls_rotation::scattering::{self, DatumOptions};

fn main() -> nls_rotation::Result<()> {
    let datum = scattering::build_rotating_datum(0.0, 1, 1, Sign::Focusing, &DatumOptions::reference(1))?;
    for epsilon in [1e-3, 1e-1] {
        let r = scattering::stability_probe(&datum.endpoint, Sign::Focusing, epsilon, 8, 7, 1e-3)?;
        println!("eps = {epsilon:e}: {} of {} blew up, max mass drift {:.1e}", r.blowups, r.trials, r.max_mass_drift);
    }
    Ok(())
}
