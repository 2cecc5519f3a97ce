//! Gauge, translation, conjugation and Fourier identities of the scattering
//! and wave operators.

use std::f64::consts::PI;

use nls_rotation::scattering;
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let u = Field::gaussian(Grid::line(24.0, 2048), 1.0);
    let r = scattering::identity_suite(&u, PI / 3.0, [20, 0], 1e-3)?;
    println!("{r:#?}");
    match scattering::identity_suite(&Field::gaussian(Grid::line(12.0, 512), 1.0), PI / 3.0, [20, 0], 1e-3) {
        Err(e) => println!("small box: {e}"),
        Ok(r) => println!("small box: max defect {:.2e}", r.max_defect()),
    }
    Ok(())
}
