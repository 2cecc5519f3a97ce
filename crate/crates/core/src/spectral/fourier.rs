//! Continuum-normalized Fourier transform on the periodic box.
//!
//! For a field on `[-L, L)^d` the transform
//!
//! ```text
//! F f(xi) = (2 pi)^(-d/2) sum_j f(x_j) exp(-i x_j . xi) dx^d
//! ```
//!
//! is evaluated on the dual grid. Because `x_0 = -L` and `xi_0 = -pi/dx`, the
//! kernel factors into an ordinary DFT with alternating signs on both sides
//! (the constant phase `exp(-i pi N / 2)` is one for `N` divisible by four).
//! The discrete map is exactly unitary and `F F f = f(-.)` holds to round-off.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{Field, Grid};
use crate::error::Result;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// Reusable FFT plans and scratch space for repeated transforms on one grid.
pub struct FftWorkspace {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl FftWorkspace {
    pub fn new(grid: Grid) -> Self {
        let n = grid.points();
        let forward = plan(n, FftDirection::Forward);
        let inverse = plan(n, FftDirection::Inverse);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        FftWorkspace {
            grid,
            forward,
            inverse,
            line: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Unnormalized DFT over every axis, in place.
    fn dft(&mut self, data: &mut [Complex64], direction: FftDirection) {
        let n = self.grid.points();
        let fft = match direction {
            FftDirection::Forward => self.forward.clone(),
            FftDirection::Inverse => self.inverse.clone(),
        };
        for row in data.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut self.scratch);
        }
        if self.grid.dim() == 2 {
            for col in 0..n {
                for (r, v) in self.line.iter_mut().enumerate() {
                    *v = data[r * n + col];
                }
                fft.process_with_scratch(&mut self.line, &mut self.scratch);
                for (r, v) in self.line.iter().enumerate() {
                    data[r * n + col] = *v;
                }
            }
        }
    }

    fn alternate_signs(&self, data: &mut [Complex64]) {
        for (i, v) in data.iter_mut().enumerate() {
            let m = self.grid.unflatten(i);
            if (m[0] + m[1]) % 2 == 1 {
                *v = -*v;
            }
        }
    }

    /// Samples on `grid` to samples of the transform on `grid.dual()`.
    pub fn forward_in_place(&mut self, data: &mut [Complex64]) {
        self.alternate_signs(data);
        self.dft(data, FftDirection::Forward);
        self.alternate_signs(data);
        let c = (self.grid.dx() / (2.0 * PI).sqrt()).powi(self.grid.dim() as i32);
        data.iter_mut().for_each(|v| *v *= c);
    }

    /// Samples on `grid.dual()` back to samples on `grid`.
    pub fn inverse_in_place(&mut self, data: &mut [Complex64]) {
        self.alternate_signs(data);
        self.dft(data, FftDirection::Inverse);
        self.alternate_signs(data);
        let c = (self.grid.dual_spacing() / (2.0 * PI).sqrt()).powi(self.grid.dim() as i32);
        data.iter_mut().for_each(|v| *v *= c);
    }

    /// `F^{-1}(m F f)` for a multiplier sampled on the dual grid.
    ///
    /// The alternating signs between the two transforms cancel, so this costs
    /// two plain DFTs.
    pub fn apply_multiplier_in_place(&mut self, data: &mut [Complex64], multiplier: &[Complex64]) {
        debug_assert_eq!(multiplier.len(), data.len());
        self.alternate_signs(data);
        self.dft(data, FftDirection::Forward);
        let norm = 1.0 / data.len() as f64;
        for (v, m) in data.iter_mut().zip(multiplier) {
            *v *= m * norm;
        }
        self.dft(data, FftDirection::Inverse);
        self.alternate_signs(data);
    }

    /// Real-multiplier variant of [`Self::apply_multiplier_in_place`].
    pub fn apply_real_multiplier_in_place(&mut self, data: &mut [Complex64], multiplier: &[f64]) {
        debug_assert_eq!(multiplier.len(), data.len());
        self.alternate_signs(data);
        self.dft(data, FftDirection::Forward);
        let norm = 1.0 / data.len() as f64;
        for (v, m) in data.iter_mut().zip(multiplier) {
            *v *= m * norm;
        }
        self.dft(data, FftDirection::Inverse);
        self.alternate_signs(data);
    }
}

/// Fourier transform of `f`, living on `f.grid().dual()`.
pub fn fourier(f: &Field) -> Result<Field> {
    f.check_finite()?;
    let mut ws = FftWorkspace::new(*f.grid());
    let mut data = f.values().to_vec();
    ws.forward_in_place(&mut data);
    Field::new(f.grid().dual(), data)
}

/// Inverse of [`fourier`]: `g` lives on a dual grid and the result on its dual.
pub fn inverse_fourier(g: &Field) -> Result<Field> {
    g.check_finite()?;
    let target = g.grid().dual();
    let mut ws = FftWorkspace::new(target);
    let mut data = g.values().to_vec();
    ws.inverse_in_place(&mut data);
    Field::new(target, data)
}

/// `F^{-1}(m(xi) F f)` with `m` evaluated at the dual-grid frequencies.
pub fn apply_multiplier(f: &Field, m: impl Fn(&[f64]) -> Complex64) -> Field {
    let grid = *f.grid();
    let dual = grid.dual();
    let d = grid.dim();
    let mult: Vec<Complex64> = (0..dual.len()).map(|i| m(&dual.coords(i)[..d])).collect();
    let mut ws = FftWorkspace::new(grid);
    let mut data = f.values().to_vec();
    ws.apply_multiplier_in_place(&mut data, &mult);
    Field::new(grid, data).expect("same length")
}

/// `|xi|^2` on the dual grid of `grid`.
pub fn frequency_squared(grid: &Grid) -> Vec<f64> {
    grid.dual().radius_squared()
}

/// Partial derivative along `axis` via the multiplier `i xi_axis`.
///
/// The Nyquist frequency has no symmetric partner on the grid, so its
/// derivative is set to zero; this keeps the operator odd under reflection.
pub fn partial(f: &Field, axis: usize) -> Field {
    let nyquist = f.grid().max_frequency();
    apply_multiplier(f, |xi| {
        if (xi[axis] + nyquist).abs() < 1e-9 * nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, xi[axis])
        }
    })
}

/// Gradient components, one field per axis.
pub fn gradient(f: &Field) -> Vec<Field> {
    (0..f.grid().dim()).map(|a| partial(f, a)).collect()
}

/// Laplacian via the multiplier `-|xi|^2`.
pub fn laplacian(f: &Field) -> Field {
    apply_multiplier(f, |xi| Complex64::new(-xi.iter().map(|v| v * v).sum::<f64>(), 0.0))
}

/// One-dimensional band-limited interpolation of periodic samples.
///
/// `line` holds samples at `-L + j dx`; the result holds the trigonometric
/// interpolant at each target. Targets outside `[-L, L]` evaluate to zero: the
/// fields handled here decay well before the box edge, so the periodic
/// continuation would only reintroduce wrapped-around mass.
pub fn interpolate_line(line: &[Complex64], half_width: f64, targets: &[f64]) -> Vec<Complex64> {
    let n = line.len();
    let dx = 2.0 * half_width / n as f64;
    // Plain DFT coefficients c_k with f_j = (1/n) sum_k c_k exp(2 pi i j k / n).
    let mut coef = line.to_vec();
    let mut scratch = Vec::new();
    let fft = plan(n, FftDirection::Forward);
    scratch.resize(fft.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
    fft.process_with_scratch(&mut coef, &mut scratch);
    let half = n / 2;
    targets
        .iter()
        .map(|&x| {
            if x.abs() > half_width * (1.0 + 1e-12) {
                return Complex64::new(0.0, 0.0);
            }
            // Position in units of cells from the left edge.
            let s = (x + half_width) / dx;
            let w = 2.0 * PI * s / n as f64;
            let mut acc = coef[0];
            let step = Complex64::from_polar(1.0, w);
            let mut rot = step;
            for k in 1..half {
                // Frequencies k and -k (stored at n - k).
                acc += coef[k] * rot + coef[n - k] * rot.conj();
                rot *= step;
                if k % 32 == 0 {
                    rot = Complex64::from_polar(1.0, w * (k + 1) as f64);
                }
            }
            // Nyquist term split symmetrically so real data stays real.
            acc += coef[half] * (w * half as f64).cos();
            acc / n as f64
        })
        .collect()
}

/// Evaluates the band-limited interpolant of `f` on the tensor product of
/// per-axis target coordinates. Returns values in row-major order.
pub fn interpolate_tensor(f: &Field, targets: &[Vec<f64>]) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.points();
    let l = grid.half_width();
    match grid.dim() {
        1 => interpolate_line(f.values(), l, &targets[0]),
        _ => {
            let (t0, t1) = (&targets[0], &targets[1]);
            // Along axis 1 first: rows of length n -> rows of length t1.len().
            let mut stage = vec![Complex64::new(0.0, 0.0); n * t1.len()];
            for r in 0..n {
                let row = interpolate_line(&f.values()[r * n..(r + 1) * n], l, t1);
                stage[r * t1.len()..(r + 1) * t1.len()].copy_from_slice(&row);
            }
            let mut out = vec![Complex64::new(0.0, 0.0); t0.len() * t1.len()];
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..t1.len() {
                for (r, v) in col.iter_mut().enumerate() {
                    *v = stage[r * t1.len() + c];
                }
                let vals = interpolate_line(&col, l, t0);
                for (a, v) in vals.into_iter().enumerate() {
                    out[a * t1.len() + c] = v;
                }
            }
            out
        }
    }
}

/// Spectral resampling of `f` onto another grid of the same dimension.
pub fn resample(f: &Field, target: &Grid) -> Result<Field> {
    if target.dim() != f.grid().dim() {
        return Err(crate::error::Error::InvalidGrid("resample across dimensions".into()));
    }
    let axis = target.axis();
    let targets = vec![axis; target.dim()];
    Field::new(*target, interpolate_tensor(f, &targets))
}

/// `f(x / c)` on the same grid, by band-limited interpolation.
pub fn dilate(f: &Field, c: f64) -> Field {
    let grid = *f.grid();
    let axis: Vec<f64> = grid.axis().iter().map(|x| x / c).collect();
    let targets = vec![axis; grid.dim()];
    Field::new(grid, interpolate_tensor(f, &targets)).expect("same length")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_line(l: f64, n: usize) -> Field {
        Field::gaussian(Grid::line(l, n), 1.0)
    }

    #[test]
    fn gaussian_is_fixed() {
        let f = gaussian_line(10.0, 256);
        let fh = fourier(&f).unwrap();
        let want = Field::gaussian(*fh.grid(), 1.0);
        let err = fh.values().iter().zip(want.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "max error {err}");
    }

    #[test]
    fn gaussian_is_fixed_in_2d() {
        let f = Field::gaussian(Grid::new(2, 8.0, 64).unwrap(), 1.0);
        let fh = fourier(&f).unwrap();
        let want = Field::gaussian(*fh.grid(), 1.0);
        assert!(fh.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn zero_and_nonfinite() {
        let g = Grid::line(5.0, 64);
        assert_eq!(fourier(&Field::zeros(g)).unwrap().l2(), 0.0);
        let mut bad = Field::zeros(g);
        bad.values_mut()[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(fourier(&bad), Err(crate::Error::InvalidField)));
    }

    #[test]
    fn twice_is_reflection() {
        let g = Grid::line(8.0, 128);
        let f = Field::from_fn(g, |x| {
            let b = (-(x[0] - 1.0).powi(2)).exp();
            Complex64::new(b * (2.0 * x[0]).cos(), b * x[0])
        });
        let ff = fourier(&fourier(&f).unwrap()).unwrap();
        assert!(ff.grid().approx_eq(&g));
        assert!(ff.distance(&f.reflect()).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_gaussian() {
        let f = gaussian_line(10.0, 256);
        let df = partial(&f, 0);
        let want = Field::from_real_fn(*f.grid(), |x| -x[0] * (-0.5 * x[0] * x[0]).exp());
        assert!(df.distance(&want).unwrap() < 1e-12);
        let lap = laplacian(&f);
        let want = Field::from_real_fn(*f.grid(), |x| (x[0] * x[0] - 1.0) * (-0.5 * x[0] * x[0]).exp());
        assert!(lap.distance(&want).unwrap() < 1e-11);
    }

    #[test]
    fn interpolation_reproduces_smooth_function() {
        let f = gaussian_line(10.0, 128);
        let targets = [0.013, -2.71, 3.3333, 9.9, 11.0];
        let vals = interpolate_line(f.values(), 10.0, &targets);
        for (x, v) in targets.iter().zip(&vals) {
            let want = if x.abs() > 10.0 { 0.0 } else { (-0.5 * x * x).exp() };
            assert!((v.re - want).abs() < 1e-12 && v.im.abs() < 1e-12, "{x}: {v}");
        }
        // At the nodes the interpolant is the data.
        let nodes = f.grid().axis();
        let back = interpolate_line(f.values(), 10.0, &nodes);
        for (a, b) in back.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn resample_between_grids() {
        let f = Field::gaussian(Grid::new(2, 9.0, 64).unwrap(), 1.0);
        let target = Grid::new(2, 6.0, 32).unwrap();
        let r = resample(&f, &target).unwrap();
        assert!(r.distance(&Field::gaussian(target, 1.0)).unwrap() < 1e-12);
    }
}
