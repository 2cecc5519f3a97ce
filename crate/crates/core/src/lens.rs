//! The lens transform
//!
//! ```text
//! v(s, x) = (cos s)^{-d/2} u(tan s, x / cos s) exp(-i |x|^2 tan(s) / 2),   |s| < pi/2,
//! ```
//!
//! which carries solutions of the free mass-critical equation to solutions of
//! the harmonic one, its inverse, and the vector fields
//! `J(t) = x sin t - i cos t ∇`, `K(t) = x cos t + i sin t ∇`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{fourier, Field};

/// Relative mass change tolerated when a rescaling pushes samples out of the box.
pub const MASS_LOSS_TOL: f64 = 1e-10;

/// A time on the harmonic side, `-pi/2 <= s <= pi/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LensTime {
    Interior(f64),
    /// `s = -pi/2`, the image of `t = -infinity`.
    Start,
    /// `s = pi/2`, the image of `t = +infinity`.
    End,
}

impl LensTime {
    pub fn new(s: f64) -> Result<Self> {
        if s.abs() < FRAC_PI_2 {
            Ok(LensTime::Interior(s))
        } else if s == -FRAC_PI_2 {
            Ok(LensTime::Start)
        } else if s == FRAC_PI_2 {
            Ok(LensTime::End)
        } else {
            Err(Error::SingularTime(s))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LensTime::Interior(s) => s,
            LensTime::Start => -FRAC_PI_2,
            LensTime::End => FRAC_PI_2,
        }
    }

    pub fn is_endpoint(self) -> bool {
        !matches!(self, LensTime::Interior(_))
    }

    /// `tan s`, the matching time on the free side, for interior times.
    pub fn free_time(self) -> Option<f64> {
        match self {
            LensTime::Interior(s) => Some(s.tan()),
            _ => None,
        }
    }
}

fn check_mass(before: &Field, after: &Field) -> Result<()> {
    let (m0, m1) = (before.l2_squared(), after.l2_squared());
    if m0 > 0.0 && (m1 - m0).abs() > MASS_LOSS_TOL * m0 {
        return Err(Error::Truncation(format!(
            "rescaling lost relative mass {:.3e}; enlarge the box",
            (m1 - m0).abs() / m0
        )));
    }
    Ok(())
}

/// `v(s)` from `u(tan s)`.
pub fn lens_forward(u_at_tan_s: &Field, s: LensTime) -> Result<Field> {
    let s = match s {
        LensTime::Interior(s) => s,
        other => return Err(Error::SingularTime(other.value())),
    };
    let d = u_at_tan_s.grid().dim() as f64;
    let c = s.cos();
    let a = s.tan();
    let dilated = fourier::dilate(u_at_tan_s, c);
    let r2 = u_at_tan_s.grid().radius_squared();
    let mut out = dilated;
    for (v, r) in out.values_mut().iter_mut().zip(&r2) {
        *v *= Complex64::from_polar(c.powf(-0.5 * d), -0.5 * a * r);
    }
    check_mass(u_at_tan_s, &out)?;
    Ok(out)
}

/// `u(t)` from `v(arctan t)`:
/// `(1+t^2)^{-d/4} exp(i t |x|^2 / (2(1+t^2))) v(arctan t, x / sqrt(1+t^2))`.
pub fn lens_inverse(v_at_s: &Field, t: f64) -> Result<Field> {
    let d = v_at_s.grid().dim() as f64;
    let q = 1.0 + t * t;
    let dilated = fourier::dilate(v_at_s, q.sqrt());
    let r2 = v_at_s.grid().radius_squared();
    let mut out = dilated;
    for (v, r) in out.values_mut().iter_mut().zip(&r2) {
        *v *= Complex64::from_polar(q.powf(-0.25 * d), 0.5 * t * r / q);
    }
    check_mass(v_at_s, &out)?;
    Ok(out)
}

/// Components of `J(t) f` and `K(t) f`, one field per axis.
pub fn apply_jk(f: &Field, t: f64) -> (Vec<Field>, Vec<Field>) {
    let (s, c) = t.sin_cos();
    let grid = *f.grid();
    let d = grid.dim();
    let grad = fourier::gradient(f);
    let mut j = Vec::with_capacity(d);
    let mut k = Vec::with_capacity(d);
    for (axis, g) in grad.iter().enumerate() {
        let x = Field::from_real_fn(grid, |p| p[axis]).mul(f).expect("same grid");
        let ig = g.scale(Complex64::new(0.0, 1.0));
        j.push(x.scale_real(s).sub(&ig.scale_real(c)).expect("same grid"));
        k.push(x.scale_real(c).add(&ig.scale_real(s)).expect("same grid"));
    }
    (j, k)
}
