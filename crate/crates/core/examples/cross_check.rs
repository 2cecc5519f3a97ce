//! The lens route against direct integration on a wide box.

use nls_rotation::propagator::Sign;
use nls_rotation::scattering::{self, DirectOptions};
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let u = Field::gaussian(Grid::line(12.0, 1024), 0.2);
    let opts = DirectOptions::default();
    let (lens, direct) = scattering::cross_check(&u, Sign::Defocusing, 1e-3, &scattering::direct_grid(1), &opts)?;
    println!("direct window T = {}, dt = {}", opts.horizon, opts.dt);
    println!("gap {:.2e}", lens.cross_check_gap.unwrap_or(f64::NAN));
    println!("direct truncation estimate {:.2e}", direct.discretization_estimate.unwrap_or(f64::NAN));
    Ok(())
}
