//! Grids, fields and the continuum-normalized Fourier transform.

use num_complex::Complex64;

use nls_rotation::spectral::{fourier, grad_l2, Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 256);
    println!("grid: L = {}, N = {}, dx = {:.4}", g.half_width(), g.points(), g.dx());
    let dual = g.dual();
    println!(
        "dual: L = {:.3}, spacing = {:.4}, Nyquist = {:.3}",
        dual.half_width(),
        g.dual_spacing(),
        g.max_frequency()
    );

    let f = Field::from_fn(g, |x| Complex64::from_polar((-0.5 * x[0] * x[0]).exp(), 1.5 * x[0]));
    let fh = fourier::fourier(&f)?;
    println!("||f|| = {:.12}, ||Ff|| = {:.12}", f.l2(), fh.l2());
    println!("||F^2 f - f(-x)|| = {:.2e}", fourier::fourier(&fh)?.distance(&f.reflect())?);
    println!("||grad f|| = {:.6} (exact {:.6})", grad_l2(&f), (std::f64::consts::PI.sqrt() * (0.5 + 2.25)).sqrt());

    let fine = fourier::resample(&f, &Grid::line(12.0, 1024))?;
    println!("resampled to N = 1024, ||f|| = {:.12}", fine.l2());
    Ok(())
}
