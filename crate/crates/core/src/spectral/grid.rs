use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic mesh on the box `[-L, L)^d`.
///
/// Points along each axis are `x_j = -L + j dx`, `j = 0..N`, with `dx = 2L/N`.
/// The dual (frequency) mesh has spacing `pi/L` and half-width `pi N / (2L)`,
/// and the dual of the dual is the original grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width {half_width} must be positive")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("{points} points per axis: need a power of two >= 8")));
        }
        Ok(Grid { dim, half_width, points })
    }

    /// 1-d grid, panicking on invalid parameters. Handy in tests and examples.
    pub fn line(half_width: f64, points: usize) -> Self {
        Grid::new(1, half_width, points).expect("invalid 1-d grid")
    }

    /// Grid whose dual coincides with itself: `L = sqrt(pi N / 2)`.
    pub fn self_dual(dim: usize, points: usize) -> Result<Self> {
        Grid::new(dim, (PI * points as f64 / 2.0).sqrt(), points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, `N^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Quadrature weight of one cell, `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Spacing of the dual mesh, `pi / L`.
    pub fn dual_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Largest resolved frequency, `pi N / (2L)`.
    pub fn max_frequency(&self) -> f64 {
        PI * self.points as f64 / (2.0 * self.half_width)
    }

    /// The frequency grid on which Fourier transforms of fields on `self` live.
    pub fn dual(&self) -> Grid {
        Grid { dim: self.dim, half_width: self.max_frequency(), points: self.points }
    }

    /// Coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.points).map(|j| -self.half_width + j as f64 * dx).collect()
    }

    /// Row-major multi-index of a flat sample index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.points, idx % self.points],
        }
    }

    /// Position of each sample, `d` coordinates per sample.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        let m = self.unflatten(idx);
        let c = |j: usize| -self.half_width + j as f64 * dx;
        match self.dim {
            1 => [c(m[0]), 0.0],
            _ => [c(m[0]), c(m[1])],
        }
    }

    /// `|x|^2` at every sample.
    pub fn radius_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let c = self.coords(i);
                c[0] * c[0] + c[1] * c[1]
            })
            .collect()
    }

    /// Flat index of the sample at `-x`; the map is an involution on the grid.
    pub fn reflect_index(&self, idx: usize) -> usize {
        let n = self.points;
        let m = self.unflatten(idx);
        let r = |j: usize| (n - j) % n;
        match self.dim {
            1 => r(m[0]),
            _ => r(m[0]) * n + r(m[1]),
        }
    }

    pub fn approx_eq(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.approx_eq(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: *self, right: *other })
        }
    }
}
