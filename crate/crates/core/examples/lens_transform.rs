//! The lens transform between the free and harmonic equations.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use nls_rotation::free::propagate_u0;
use nls_rotation::harmonic::propagate_shear;
use nls_rotation::lens::{lens_forward, lens_inverse, LensTime};
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(16.0, 1024);
    let u0 = Field::from_fn(g, |x| Complex64::from_polar((-0.5 * (x[0] - 0.5).powi(2)).exp(), 0.4 * x[0]));
    let free = propagate_u0(&u0, 1.0);
    let harmonic = propagate_shear(&u0, FRAC_PI_4);
    println!(
        "L(U_0(1) u0) vs U_H(pi/4) u0: {:.2e}",
        lens_forward(&free, LensTime::new(FRAC_PI_4)?)?.distance(&harmonic)?
    );
    println!("inverse lens round trip: {:.2e}", lens_inverse(&harmonic, 1.0)?.distance(&free)?);
    Ok(())
}
