//! First-order expansion of the scattering operator at small data.

use std::f64::consts::PI;

use nls_rotation::scattering;
use nls_rotation::spectral::{Field, Grid};

fn main() -> nls_rotation::Result<()> {
    let g = Grid::line(12.0, 1024);
    let u = Field::from_real_fn(g, |x| PI.powf(-0.25) * (-0.5 * x[0] * x[0]).exp());
    let p = scattering::perturbative_p(&u, 1e-10)?;
    println!(
        "||P(u)|| = {:.10} ({} Simpson intervals), 1/sqrt 3 = {:.10}",
        p.field.l2(),
        p.intervals,
        1.0 / 3f64.sqrt()
    );
    let report = scattering::expansion_study(&u, &[0.1, 0.15, 0.2, 0.3], 1e-3)?;
    for ((eps, ratio), res) in report.epsilons.iter().zip(&report.ratios).zip(&report.residuals) {
        println!("eps = {eps:.2}: ratio {ratio:.4}, second-order residual {res:.2e}");
    }
    println!("residual slope {:.2}", report.slope);
    Ok(())
}
