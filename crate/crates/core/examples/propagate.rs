//! Split-step integration of the nonlinear equation with and without the
//! harmonic potential.

use num_complex::Complex64;

use nls_rotation::propagator::{self, NlsConfig, Potential, PropagateOptions, Sign};
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    let u0 = Field::from_fn(g, |x| Complex64::from_polar((-0.5 * x[0] * x[0]).exp(), 0.3 * x[0]));
    for (sign, potential) in [(Sign::Defocusing, Potential::Harmonic), (Sign::Focusing, Potential::None)] {
        let cfg = NlsConfig::critical(1, sign, potential);
        let opts = PropagateOptions { checkpoints: vec![0.5], richardson: true };
        let r = propagator::propagate_with(&u0, 0.0, 1.0, &cfg, 1e-3, &opts)?;
        println!(
            "{sign:?}/{potential:?}: {} steps, mass drift {:.1e}, energy drift {:.1e}, Richardson error {:.1e}",
            r.steps,
            r.mass_drift,
            r.energy_drift,
            r.richardson_error.unwrap_or(f64::NAN)
        );
    }

    let q = nls_rotation::eigen::solve_q(g)?.psi.scale_real(1.5);
    let r = propagator::propagate(&q, 0.0, 3.0, &NlsConfig::critical(1, Sign::Focusing, Potential::None), 1e-3)?;
    println!("1.5 Q: blew up = {}, at t = {:?}", r.blew_up, r.blowup_time);
    Ok(())
}
