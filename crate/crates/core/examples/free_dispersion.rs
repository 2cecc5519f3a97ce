//! Free Schrödinger flow, its large-time factorization and asymptotic states.

use num_complex::Complex64;

use nls_rotation::free::{dispersive_factorization, extract_asymptotic_state, propagate_u0, Direction};
use nls_rotation::scattering::direct_grid;
use nls_rotation::spectral::Field;

fn main() -> nls_rotation::Result<()> {
    let g = direct_grid(1);
    let f = Field::from_fn(g, |x| Complex64::from_polar((-0.5 * x[0] * x[0]).exp(), 0.3 * x[0]));
    for t in [2.0, 8.0, 32.0] {
        let u = propagate_u0(&f, t);
        let approx = dispersive_factorization(&f, t)?;
        println!("t = {t:4}: sup |u| = {:.4}, factorization error {:.3e}", u.linf(), u.distance(&approx)?);
    }
    let u = propagate_u0(&f, 20.0);
    let state = extract_asymptotic_state(&u, 20.0, Direction::Plus, Some((&propagate_u0(&f, 10.0), 10.0)))?;
    println!("recovered asymptotic state: error {:.2e}", state.field.distance(&f)?);
    Ok(())
}
