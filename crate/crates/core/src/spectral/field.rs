use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};

/// Complex samples of a function on a [`Grid`], stored row-major.
#[derive(Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field").field("grid", &self.grid).field("l2", &self.l2()).finish_non_exhaustive()
    }
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(x)` at every grid point; `x` carries `d` meaningful coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.coords(i)[..d])).collect();
        Field { grid, values }
    }

    /// Real-valued samples.
    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// `exp(-|x|^2/2)` scaled by `amplitude`.
    pub fn gaussian(grid: Grid, amplitude: f64) -> Self {
        Self::from_real_fn(grid, |x| amplitude * (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidField)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> Field {
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    /// Multiplies by `exp(i eta)`.
    pub fn rotate(&self, eta: f64) -> Field {
        self.scale(Complex64::from_polar(1.0, eta))
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Field {
        let values = (0..self.grid.len()).map(|i| self.values[self.grid.reflect_index(i)]).collect();
        Field { grid: self.grid, values }
    }

    /// `x -> f(x + a)` with `a = offset * dx` along each axis, periodically.
    pub fn shift(&self, offset: [isize; 2]) -> Field {
        let n = self.grid.points() as isize;
        let wrap = |j: usize, k: isize| ((j as isize + k).rem_euclid(n)) as usize;
        let values = (0..self.grid.len())
            .map(|i| {
                let m = self.grid.unflatten(i);
                let src = match self.grid.dim() {
                    1 => wrap(m[0], offset[0]),
                    _ => wrap(m[0], offset[0]) * n as usize + wrap(m[1], offset[1]),
                };
                self.values[src]
            })
            .collect();
        Field { grid: self.grid, values }
    }

    /// Average over the reflection group of the grid: `x -> -x` in 1-d, the
    /// eight axis reflections and swaps in 2-d.
    pub fn symmetrize(&self) -> Field {
        match self.grid.dim() {
            1 => {
                let r = self.reflect();
                self.zip_with(&r, |a, b| 0.5 * (a + b)).expect("same grid")
            }
            _ => {
                let n = self.grid.points();
                let flip = |j: usize| (n - j) % n;
                let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
                for (i, o) in out.iter_mut().enumerate() {
                    let [a, b] = self.grid.unflatten(i);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (p, q) in [(a, b), (b, a)] {
                        for (pp, qq) in [(p, q), (flip(p), q), (p, flip(q)), (flip(p), flip(q))] {
                            acc += self.values[pp * n + qq];
                        }
                    }
                    *o = acc / 8.0;
                }
                Field { grid: self.grid, values: out }
            }
        }
    }

    pub fn l2_squared(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn l2(&self) -> f64 {
        self.l2_squared().sqrt()
    }

    /// `(int |f|^p)^(1/p)`.
    pub fn lp(&self, p: f64) -> f64 {
        self.lp_integral(p).powf(1.0 / p)
    }

    /// `int |f|^p` by the rectangle rule.
    pub fn lp_integral(&self, p: f64) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|z| z.norm().powf(p)).sum::<f64>()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `int f conj(g)`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.l2())
    }

    /// `||f - g|| / ||g||`, or the absolute distance when `g = 0`.
    pub fn relative_distance(&self, reference: &Field) -> Result<f64> {
        let d = self.distance(reference)?;
        let n = reference.l2();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// Mass carried by samples within `width` cells of the box boundary.
    pub fn boundary_mass(&self, width: usize) -> f64 {
        let n = self.grid.points();
        let near = |j: usize| j < width || j + width >= n;
        let vol = self.grid.cell_volume();
        (0..self.grid.len())
            .filter(|&i| {
                let m = self.grid.unflatten(i);
                near(m[0]) || (self.grid.dim() == 2 && near(m[1]))
            })
            .map(|i| self.values[i].norm_sqr() * vol)
            .sum()
    }
}
