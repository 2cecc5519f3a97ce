//! The harmonic oscillator `H = -Δ/2 + |x|^2/2` and its propagator
//! `U_H(t) = exp(-i t H)`.
//!
//! Two exact-in-time propagators are provided. [`HermiteBasis::propagate`]
//! expands in eigenfunctions and rotates each coefficient; it is exact for
//! fields inside the retained span. [`propagate_shear`] uses the phase-space
//! rotation identity
//!
//! ```text
//! U_H(t) = exp(-i tan(t/2) |x|^2/2) U_0(sin t) exp(-i tan(t/2) |x|^2/2),   |t| < pi,
//! ```
//!
//! which needs no truncation and is what the split-step integrator uses for
//! its linear substep.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{fourier, FftWorkspace, Field, Grid};

/// `H f`: kinetic part through the multiplier `|xi|^2/2`, potential pointwise.
pub fn apply_h(f: &Field) -> Field {
    let mut out = kinetic(f);
    let r2 = f.grid().radius_squared();
    for ((o, v), r) in out.values_mut().iter_mut().zip(f.values()).zip(&r2) {
        *o += v * (0.5 * r);
    }
    out
}

/// `-Δ f / 2`.
pub fn kinetic(f: &Field) -> Field {
    let xi2 = fourier::frequency_squared(f.grid());
    let half: Vec<f64> = xi2.iter().map(|v| 0.5 * v).collect();
    let mut ws = FftWorkspace::new(*f.grid());
    let mut data = f.values().to_vec();
    ws.apply_real_multiplier_in_place(&mut data, &half);
    Field::new(*f.grid(), data).expect("same length")
}

/// `<H f, f>`, real for any `f`.
pub fn expectation(f: &Field) -> f64 {
    apply_h(f).inner(f).expect("same grid").re
}

/// One-dimensional Hermite functions `psi_0..=psi_kmax` at the points `xs`,
/// normalized in `L^2(R)`, from the three-term recurrence
/// `psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}`.
pub fn hermite_functions(k_max: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(k_max + 1);
    let c0 = PI.powf(-0.25);
    out.push(xs.iter().map(|x| c0 * (-0.5 * x * x).exp()).collect::<Vec<_>>());
    if k_max >= 1 {
        out.push(xs.iter().zip(&out[0]).map(|(x, p)| 2f64.sqrt() * x * p).collect());
    }
    for k in 1..k_max {
        let a = (2.0 / (k + 1) as f64).sqrt();
        let b = (k as f64 / (k + 1) as f64).sqrt();
        let next = xs.iter().enumerate().map(|(i, x)| a * x * out[k][i] - b * out[k - 1][i]).collect();
        out.push(next);
    }
    out
}

/// Eigenfunctions of `H` with total degree `|k| <= k_max`, sampled and
/// normalized on a grid.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    grid: Grid,
    k_max: usize,
    indices: Vec<[usize; 2]>,
    functions: Vec<Field>,
    eigenvalues: Vec<f64>,
}

/// Residual allowed on every retained mode, `||H psi_k - lambda_k psi_k||`.
pub const MODE_RESIDUAL_TOL: f64 = 1e-8;
/// Largest relative `L^2` defect of a field's projection onto the basis
/// before [`HermiteBasis::propagate`] refuses it.
pub const PROJECTION_TOL: f64 = 1e-8;

impl HermiteBasis {
    pub fn build(grid: Grid, k_max: usize) -> Result<Self> {
        let axis = grid.axis();
        let table = hermite_functions(k_max, &axis);
        let d = grid.dim();
        let mut indices = Vec::new();
        for total in 0..=k_max {
            match d {
                1 => indices.push([total, 0]),
                _ => (0..=total).for_each(|k1| indices.push([k1, total - k1])),
            }
        }
        let mut functions = Vec::with_capacity(indices.len());
        let mut eigenvalues = Vec::with_capacity(indices.len());
        for idx in &indices {
            let values: Vec<Complex64> = (0..grid.len())
                .map(|i| {
                    let m = grid.unflatten(i);
                    let v = match d {
                        1 => table[idx[0]][m[0]],
                        _ => table[idx[0]][m[0]] * table[idx[1]][m[1]],
                    };
                    Complex64::new(v, 0.0)
                })
                .collect();
            let f = Field::new(grid, values)?;
            let f = f.scale_real(1.0 / f.l2());
            let lambda = d as f64 / 2.0 + (idx[0] + idx[1]) as f64;
            let residual = apply_h(&f).sub(&f.scale_real(lambda))?.l2();
            if !(residual <= MODE_RESIDUAL_TOL) {
                return Err(Error::Truncation(format!("mode {idx:?} unresolved on {grid:?}: residual {residual:.3e}")));
            }
            functions.push(f);
            eigenvalues.push(lambda);
        }
        Ok(HermiteBasis { grid, k_max, indices, functions, eigenvalues })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Multi-indices in order of increasing total degree.
    pub fn indices(&self) -> &[[usize; 2]] {
        &self.indices
    }

    pub fn functions(&self) -> &[Field] {
        &self.functions
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn coefficients(&self, f: &Field) -> Result<Vec<Complex64>> {
        self.functions.iter().map(|psi| f.inner(psi)).collect()
    }

    pub fn synthesize(&self, coefficients: &[Complex64]) -> Field {
        let mut out = Field::zeros(self.grid);
        for (psi, c) in self.functions.iter().zip(coefficients) {
            for (o, p) in out.values_mut().iter_mut().zip(psi.values()) {
                *o += c * p;
            }
        }
        out
    }

    /// `||f - P f|| / ||f||` for the orthogonal projection `P` onto the span.
    pub fn projection_defect(&self, f: &Field) -> Result<f64> {
        let p = self.synthesize(&self.coefficients(f)?);
        f.relative_distance(&p).map(|d| if f.l2() == 0.0 { 0.0 } else { d })
    }

    /// `U_H(t) f`, exact in time for fields inside the span.
    pub fn propagate(&self, f: &Field, t: f64) -> Result<Field> {
        let coefficients = self.coefficients(f)?;
        let projected = self.synthesize(&coefficients);
        if f.l2() > 0.0 {
            let defect = f.relative_distance(&projected)?;
            if defect > PROJECTION_TOL {
                return Err(Error::Truncation(format!("projection defect {defect:.3e} exceeds {PROJECTION_TOL:.0e}")));
            }
        }
        let rotated: Vec<Complex64> =
            coefficients.iter().zip(&self.eigenvalues).map(|(c, l)| c * Complex64::from_polar(1.0, -l * t)).collect();
        Ok(self.synthesize(&rotated))
    }
}

/// Chirp `exp(-i a |x|^2/2)` and kinetic multiplier `exp(-i b |xi|^2/2)` making
/// up one exact harmonic step of length `t`, `|t| < pi`.
pub(crate) struct ShearStep {
    pub chirp: Vec<Complex64>,
    pub kinetic: Vec<Complex64>,
}

impl ShearStep {
    pub fn new(grid: &Grid, t: f64) -> Self {
        debug_assert!(t.abs() < PI);
        let a = (0.5 * t).tan();
        let b = t.sin();
        let chirp = grid.radius_squared().iter().map(|r| Complex64::from_polar(1.0, -0.5 * a * r)).collect();
        let kinetic =
            fourier::frequency_squared(grid).iter().map(|k| Complex64::from_polar(1.0, -0.5 * b * k)).collect();
        ShearStep { chirp, kinetic }
    }

    pub fn apply(&self, ws: &mut FftWorkspace, data: &mut [Complex64]) {
        for (v, c) in data.iter_mut().zip(&self.chirp) {
            *v *= c;
        }
        ws.apply_multiplier_in_place(data, &self.kinetic);
        for (v, c) in data.iter_mut().zip(&self.chirp) {
            *v *= c;
        }
    }
}

/// `U_H(t) f` by composing shear factorizations over pieces of length at
/// most `pi/2`. Unitary and exact in time; spatial accuracy is spectral.
pub fn propagate_shear(f: &Field, t: f64) -> Field {
    let pieces = ((t.abs() / FRAC_PI_2).ceil() as usize).max(1);
    let h = t / pieces as f64;
    let step = ShearStep::new(f.grid(), h);
    let mut ws = FftWorkspace::new(*f.grid());
    let mut data = f.values().to_vec();
    for _ in 0..pieces {
        step.apply(&mut ws, &mut data);
    }
    Field::new(*f.grid(), data).expect("same length")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Grid {
        Grid::line(12.0, 512)
    }

    #[test]
    fn ground_state_and_first_excited() {
        let g = line();
        let psi0 = Field::gaussian(g, 1.0);
        let err = apply_h(&psi0).sub(&psi0.scale_real(0.5)).unwrap().l2();
        assert!(err < 1e-10, "{err}");
        let psi1 = Field::from_real_fn(g, |x| x[0] * (-0.5 * x[0] * x[0]).exp());
        let err = apply_h(&psi1).sub(&psi1.scale_real(1.5)).unwrap().l2();
        assert!(err < 1e-10, "{err}");
        assert_eq!(apply_h(&Field::zeros(g)).l2(), 0.0);
    }

    #[test]
    fn basis_spectrum_and_parity() {
        let b = HermiteBasis::build(line(), 3).unwrap();
        assert_eq!(b.eigenvalues(), &[0.5, 1.5, 2.5, 3.5]);
        let want = Field::from_real_fn(line(), |x| PI.powf(-0.25) * (-0.5 * x[0] * x[0]).exp());
        assert!(b.functions()[0].distance(&want).unwrap() < 1e-14);
        for (k, f) in b.functions().iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!(f.reflect().distance(&f.scale_real(sign)).unwrap() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_in_2d() {
        let g = Grid::new(2, 10.0, 64).unwrap();
        let b = HermiteBasis::build(g, 6).unwrap();
        assert_eq!(b.len(), 28);
        for (i, f) in b.functions().iter().enumerate() {
            for (j, h) in b.functions().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((f.inner(h).unwrap() - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn unresolved_modes_are_rejected() {
        assert!(matches!(HermiteBasis::build(Grid::line(4.0, 64), 30), Err(Error::Truncation(_))));
    }

    #[test]
    fn eigenfunction_rotates() {
        let b = HermiteBasis::build(line(), 8).unwrap();
        let psi = &b.functions()[0];
        let out = b.propagate(psi, 0.7).unwrap();
        assert!(out.distance(&psi.rotate(-0.35)).unwrap() < 1e-13);
        let far = Field::from_real_fn(line(), |x| (-(x[0] - 8.0).powi(2)).exp());
        assert!(b.propagate(&far, 1.0).is_err());
    }

    #[test]
    fn shear_matches_hermite_propagator() {
        let g = line();
        let b = HermiteBasis::build(g, 20).unwrap();
        let coeffs: Vec<Complex64> =
            (0..=20).map(|k| Complex64::new(1.0 / (1.0 + k as f64), 0.3 * (k as f64).sin())).collect();
        let f = b.synthesize(&coeffs);
        for t in [0.1, 1.3, 3.0, -2.2, 7.5] {
            let exact = b.propagate(&f, t).unwrap();
            let shear = propagate_shear(&f, t);
            assert!(shear.distance(&exact).unwrap() < 1e-11, "t = {t}");
        }
    }
}
