//! A configured rotation experiment with reports and field files on disk.
//!
//! Output goes under `$NLSROT_OUTPUT_ROOT` (default: the working directory).

use nls_rotation::experiment::{self, ExperimentConfig};
use nls_rotation::propagator::Sign;

fn main() -> nls_rotation::Result<()> {
    let mut cfg = ExperimentConfig::new("example-rotation", Sign::Defocusing);
    cfg.theta_over_pi = vec![0.0, 1.0];
    cfg.js = vec![1];
    let outcome = experiment::run_experiment(&cfg)?;
    for r in &outcome.reports {
        println!("theta = {:.3}, j = {}: defect {:.2e}, passed {}", r.theta, r.j, r.defect, r.passed);
    }
    println!("written to {}", cfg.output_dir().display());

    let rows = experiment::resolution_study(&cfg, 2, true)?;
    for row in rows {
        println!("level {}: N = {}, dt = {:e}, defect {:.1e}", row.level, row.points, row.dt, row.defect);
    }
    Ok(())
}
