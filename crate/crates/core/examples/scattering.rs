//! The scattering operator through the lens transform, and the wave
//! operators.

use nls_rotation::propagator::Sign;
use nls_rotation::scattering;
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    let u_minus = Field::gaussian(g.dual(), 0.8);
    for sign in [Sign::Defocusing, Sign::Focusing] {
        let s = scattering::scattering_lens(&u_minus, sign, 1e-3)?;
        println!(
            "{sign:?}: ||S(u) - u|| = {:.4}, L2 defect {:.1e}, H1 defect {:.1e}",
            s.u_plus.distance(&u_minus)?,
            s.l2_defect,
            s.h1_defect
        );
    }
    let phi = scattering::wave_minus(&u_minus, Sign::Defocusing, 1e-3)?;
    let back = scattering::wave_minus_inverse(&phi, Sign::Defocusing, 1e-3)?;
    println!("W_-^{{-1}} W_- round trip: {:.2e}", back.distance(&u_minus)?);
    Ok(())
}
