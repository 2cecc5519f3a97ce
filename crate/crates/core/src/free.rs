//! Free Schrödinger dynamics `U_0(t) = exp(i t Δ/2)`, its far-field
//! factorization and the extraction of asymptotic states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{fourier, Field};

/// `U_0(t) f`: multiplies the transform by `exp(-i t |xi|^2/2)`.
pub fn propagate_u0(f: &Field, t: f64) -> Field {
    fourier::apply_multiplier(f, |xi| {
        let k2: f64 = xi.iter().map(|v| v * v).sum();
        Complex64::from_polar(1.0, -0.5 * t * k2)
    })
}

/// `A(t) f(x) = (it)^{-d/2} F f(x/t) exp(i|x|^2/(2t))`, the large-time
/// approximation of `U_0(t) f`. The transform is interpolated between nodes
/// of the dual grid; points `x/t` falling outside it read as zero.
pub fn dispersive_factorization(f: &Field, t: f64) -> Result<Field> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::SingularTime(t));
    }
    let grid = *f.grid();
    let d = grid.dim() as f64;
    let fh = fourier::fourier(f)?;
    let axis: Vec<f64> = grid.axis().iter().map(|x| x / t).collect();
    let sampled = fourier::interpolate_tensor(&fh, &vec![axis; grid.dim()]);
    // (it)^{-d/2} on the principal branch.
    let prefactor = Complex64::from_polar(t.abs().powf(-0.5 * d), -0.25 * d * PI * t.signum());
    let r2 = grid.radius_squared();
    let values =
        sampled.iter().zip(&r2).map(|(v, r)| v * prefactor * Complex64::from_polar(1.0, r / (2.0 * t))).collect();
    Field::new(grid, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticState {
    pub field: Field,
    pub direction: Direction,
    pub extraction_time: f64,
    /// `L^2` distance to the extraction from the earlier time, when one was given.
    pub convergence_estimate: f64,
}

/// `u_± ≈ U_0(∓T) u(±T)`.
///
/// `endpoint` is `u(±T)`. When `earlier` holds `u(±T/2)` (or any earlier
/// trajectory sample with its `T`), the convergence estimate is the `L^2`
/// distance between the two extractions; otherwise it is `NaN`.
pub fn extract_asymptotic_state(
    endpoint: &Field,
    t: f64,
    direction: Direction,
    earlier: Option<(&Field, f64)>,
) -> Result<AsymptoticState> {
    if !(t > 0.0) {
        return Err(Error::SingularTime(t));
    }
    let s = direction.sign();
    let field = propagate_u0(endpoint, -s * t);
    let convergence_estimate = match earlier {
        Some((u, t_early)) => propagate_u0(u, -s * t_early).distance(&field)?,
        None => f64::NAN,
    };
    Ok(AsymptoticState { field, direction, extraction_time: t, convergence_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{grad_l2, Grid};

    fn bump(g: Grid) -> Field {
        Field::from_fn(g, |x| {
            let e = (-(x[0] - 0.5).powi(2)).exp();
            Complex64::new(e * (1.0 + x[0]), e * (2.0 * x[0]).sin())
        })
    }

    #[test]
    fn group_properties() {
        let f = bump(Grid::line(20.0, 512));
        assert!(propagate_u0(&f, 0.0).distance(&f).unwrap() < 1e-14);
        let g = propagate_u0(&f, 1.7);
        assert!((g.l2() - f.l2()).abs() < 1e-13);
        assert!((grad_l2(&g) - grad_l2(&f)).abs() < 1e-12);
        assert!(propagate_u0(&g, -1.7).distance(&f).unwrap() < 1e-12);
    }

    #[test]
    fn factorization_is_unitary_and_rejects_zero_time() {
        let f = Field::gaussian(Grid::line(64.0, 1024), 1.0);
        let a = dispersive_factorization(&f, 4.0).unwrap();
        assert!((a.l2() - f.l2()).abs() < 1e-10);
        assert!(matches!(dispersive_factorization(&f, 0.0), Err(Error::SingularTime(_))));
        let z = Field::zeros(*f.grid());
        assert_eq!(dispersive_factorization(&z, 3.0).unwrap().l2(), 0.0);
    }

    #[test]
    fn linear_extraction_is_time_independent() {
        let f = bump(Grid::line(30.0, 512));
        let t = 3.0;
        let state = extract_asymptotic_state(
            &propagate_u0(&f, t),
            t,
            Direction::Plus,
            Some((&propagate_u0(&f, t / 2.0), t / 2.0)),
        )
        .unwrap();
        assert!(state.convergence_estimate < 1e-12);
        assert!(state.field.distance(&f).unwrap() < 1e-12);
        let minus = extract_asymptotic_state(&propagate_u0(&f, -t), t, Direction::Minus, None).unwrap();
        assert!(minus.field.distance(&f).unwrap() < 1e-12);
        assert!(minus.convergence_estimate.is_nan());
    }
}
