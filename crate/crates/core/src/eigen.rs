//! Even solutions of `H psi - nu psi = ∓ |psi|^{4/d} psi` by constrained
//! minimization of
//!
//! ```text
//! I(psi) = <H psi, psi>/2 - nu ||psi||^2/2
//! ```
//!
//! on `M = { psi even, (d/(d+2)) int |psi|^{2+4/d} = 1 }`. The minimizer
//! satisfies `H psi - nu psi = mu |psi|^{4/d} psi` for a multiplier `mu`, and
//! `|mu|^{d/4} psi` solves the defocusing equation when `mu < 0`, the focusing
//! one when `mu > 0`. The same machinery without the trap gives the ground
//! state `Q` of `-ΔQ/2 + Q = Q^{1+4/d}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::Sign;
use crate::spectral::{fourier, grad_l2, FftWorkspace, Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizationProblem {
    pub nu: f64,
    pub sign: Sign,
    pub grid: Grid,
    /// Include the `|x|^2/2` trap. Without it the linear part is `-Δ/2`.
    #[serde(default = "yes")]
    pub trapped: bool,
}

fn yes() -> bool {
    true
}

impl MinimizationProblem {
    pub fn new(nu: f64, sign: Sign, grid: Grid) -> Self {
        MinimizationProblem { nu, sign, grid, trapped: true }
    }

    /// Bottom of the spectrum of the linear part.
    pub fn spectral_floor(&self) -> f64 {
        if self.trapped {
            self.grid.dim() as f64 / 2.0
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let floor = self.spectral_floor();
        match self.sign {
            Sign::Defocusing if self.nu > floor => Ok(()),
            Sign::Focusing if self.nu < floor => Ok(()),
            Sign::Linear => Err(Error::InvalidProblem("no nonlinearity to balance".into())),
            _ => Err(Error::InvalidProblem(format!(
                "nu = {} is on the wrong side of {floor} for {:?}",
                self.nu, self.sign
            ))),
        }
    }

    /// Exponent `p = 2 + 4/d` of the constraint.
    pub fn exponent(&self) -> f64 {
        2.0 + 4.0 / self.grid.dim() as f64
    }
}

#[derive(Clone, Debug)]
pub struct EigenstateSolution {
    /// Rescaled profile solving the nonlinear eigenvalue equation.
    pub psi: Field,
    /// Minimizer on the constraint manifold, before rescaling.
    pub minimizer: Field,
    pub nu: f64,
    pub mu: f64,
    /// `I` at the minimizer.
    pub delta: f64,
    /// `||H psi ± |psi|^{4/d} psi - nu psi||` for the rescaled profile.
    pub residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// `I` after every accepted step.
    pub history: Vec<f64>,
}

/// `<H psi, psi>/2 - nu ||psi||^2/2`.
pub fn energy_i(psi: &Field, nu: f64) -> f64 {
    0.5 * crate::harmonic::expectation(psi) - 0.5 * nu * psi.l2_squared()
}

/// Symmetrizes and rescales onto the constraint manifold.
pub fn project_to_m(psi: &Field) -> Result<Field> {
    let even = psi.symmetrize();
    let p = 2.0 + 4.0 / psi.grid().dim() as f64;
    let g = (2.0 / p) * even.lp_integral(p);
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::DegenerateInput("field has no even part"));
    }
    Ok(even.scale_real(g.powf(-1.0 / p)))
}

/// `A = -Δ/2 + V - nu` and the shifted preconditioner `(-Δ/2 + 1)^{-1}`.
struct Operator {
    ws: FftWorkspace,
    kinetic: Vec<f64>,
    precond: Vec<f64>,
    potential: Vec<f64>,
    nu: f64,
    vol: f64,
    grid: Grid,
}

const SHIFT: f64 = 1.0;

impl Operator {
    fn new(problem: &MinimizationProblem) -> Self {
        let grid = problem.grid;
        let kinetic: Vec<f64> = fourier::frequency_squared(&grid).iter().map(|k| 0.5 * k).collect();
        let precond = kinetic.iter().map(|k| 1.0 / (k + SHIFT)).collect();
        let potential = if problem.trapped {
            grid.radius_squared().iter().map(|r| 0.5 * r).collect()
        } else {
            vec![0.0; grid.len()]
        };
        Operator {
            ws: FftWorkspace::new(grid),
            kinetic,
            precond,
            potential,
            nu: problem.nu,
            vol: grid.cell_volume(),
            grid,
        }
    }

    /// `(T + V + shift) f`.
    fn linear(&mut self, f: &[Complex64], shift: f64) -> Vec<Complex64> {
        let mut out = f.to_vec();
        self.ws.apply_real_multiplier_in_place(&mut out, &self.kinetic);
        for ((o, v), w) in out.iter_mut().zip(f).zip(&self.potential) {
            *o += v * (w + shift);
        }
        out
    }

    fn apply(&mut self, f: &[Complex64]) -> Vec<Complex64> {
        self.linear(f, -self.nu)
    }

    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        self.vol * a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>()
    }

    /// Solves `(T + V + 1) z = b` by preconditioned conjugate gradients.
    fn solve_shifted(&mut self, b: &[Complex64]) -> Vec<Complex64> {
        let nb = self.inner(b, b).sqrt();
        let mut z = vec![Complex64::new(0.0, 0.0); b.len()];
        if nb == 0.0 {
            return z;
        }
        let mut r = b.to_vec();
        let mut y = r.clone();
        self.ws.apply_real_multiplier_in_place(&mut y, &self.precond);
        let mut dir = y.clone();
        let mut ry = self.inner(&r, &y);
        for _ in 0..500 {
            let ad = self.linear(&dir, SHIFT);
            let a = ry / self.inner(&dir, &ad);
            for ((zi, ri), (di, adi)) in z.iter_mut().zip(r.iter_mut()).zip(dir.iter().zip(&ad)) {
                *zi += a * di;
                *ri -= a * adi;
            }
            if self.inner(&r, &r).sqrt() < 1e-13 * nb {
                break;
            }
            y.copy_from_slice(&r);
            self.ws.apply_real_multiplier_in_place(&mut y, &self.precond);
            let ry_next = self.inner(&r, &y);
            let beta = ry_next / ry;
            for (di, yi) in dir.iter_mut().zip(&y) {
                *di = yi + beta * *di;
            }
            ry = ry_next;
        }
        z
    }
}

fn nonlinear_term(psi: &[Complex64], dim: usize) -> Vec<Complex64> {
    psi.iter()
        .map(|v| {
            let m = v.norm_sqr();
            let w = if dim == 1 { m * m } else { m.powf(2.0 / dim as f64) };
            v * w
        })
        .collect()
}

struct State {
    psi: Field,
    a_psi: Vec<Complex64>,
    n: Vec<Complex64>,
    energy: f64,
    mu: f64,
    gradient: Vec<Complex64>,
    gradient_norm: f64,
}

impl State {
    fn new(psi: Field, op: &mut Operator) -> Self {
        let a_psi = op.apply(psi.values());
        let n = nonlinear_term(psi.values(), op.grid.dim());
        let energy = 0.5 * op.inner(&a_psi, psi.values());
        let nn = op.inner(&n, &n);
        let mu = if nn > 0.0 { op.inner(&a_psi, &n) / nn } else { 0.0 };
        let gradient: Vec<Complex64> = a_psi.iter().zip(&n).map(|(a, b)| a - mu * b).collect();
        let gradient_norm = op.inner(&gradient, &gradient).sqrt();
        State { psi, a_psi, n, energy, mu, gradient, gradient_norm }
    }

    /// Gradient of `I` composed with the scaling retraction.
    fn retracted_gradient(&self, op: &Operator) -> Vec<Complex64> {
        let c = op.inner(&self.a_psi, self.psi.values()) / op.inner(&self.n, self.psi.values());
        self.a_psi.iter().zip(&self.n).map(|(a, b)| a - c * b).collect()
    }
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 5000;

/// Preconditioned projected descent on `M` with backtracking on `I`.
///
/// The search direction is `-(H + 1)^{-1} g` where `g = A psi - mu_G n` is the
/// gradient with the Galerkin multiplier `mu_G = <A psi, n>/<n, n>`. Steps are
/// accepted by the Armijo rule; once the predicted decrease of `I` falls
/// below its rounding level, a step is accepted when it reduces `||g||`.
pub fn minimize(problem: &MinimizationProblem, init: &Field, tol: f64, max_iter: usize) -> Result<EigenstateSolution> {
    problem.validate()?;
    problem.grid.check_same(init.grid())?;
    init.check_finite()?;
    let mut op = Operator::new(problem);
    let mut state = State::new(project_to_m(init)?, &mut op);
    let mut history = vec![state.energy];
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    // Previous preconditioned gradient, gradient and direction for the
    // Polak-Ribière update.
    let mut previous: Option<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> = None;
    let mut restarted = false;
    while state.gradient_norm >= tol && iterations < max_iter {
        iterations += 1;
        let grad_r = state.retracted_gradient(&op);
        let z = op.solve_shifted(&state.gradient);
        let mut dir: Vec<Complex64> = z.iter().map(|v| -v).collect();
        if let Some((z_old, g_old, d_old)) = &previous {
            let num: f64 = op.inner(&state.gradient, &z) - op.inner(&state.gradient, z_old);
            let beta = (num / op.inner(g_old, z_old)).max(0.0);
            for (d, o) in dir.iter_mut().zip(d_old) {
                *d += beta * o;
            }
        }
        let mut slope = op.inner(&grad_r, &dir);
        if !(slope < 0.0) {
            dir = z.iter().map(|v| -v).collect();
            slope = op.inner(&grad_r, &dir);
        }
        if !(slope < 0.0) {
            dir = grad_r.iter().map(|v| -v).collect();
            slope = op.inner(&grad_r, &dir);
        }
        let e0 = state.energy;
        let mut s = (2.0 * step).min(1.0);
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<Complex64> = state.psi.values().iter().zip(&dir).map(|(p, d)| p + s * d).collect();
            let cand = State::new(project_to_m(&Field::new(problem.grid, trial)?)?, &mut op);
            let noisy = (s * slope).abs() < 1e-11 * e0.abs().max(1e-300);
            let ok =
                if noisy { cand.gradient_norm < state.gradient_norm } else { cand.energy <= e0 + 1e-4 * s * slope };
            if ok {
                accepted = Some(cand);
                break;
            }
            s *= 0.5;
        }
        match accepted {
            Some(c) => {
                previous = Some((z, std::mem::take(&mut state.gradient), dir));
                state = c;
                step = s;
                history.push(state.energy);
                restarted = false;
            }
            None if !restarted && previous.is_some() => {
                previous = None;
                step = 0.5;
                restarted = true;
            }
            None => break,
        }
    }
    finish(problem, state, iterations, history, tol)
}

fn finish(
    problem: &MinimizationProblem,
    state: State,
    iterations: usize,
    history: Vec<f64>,
    tol: f64,
) -> Result<EigenstateSolution> {
    let d = problem.grid.dim() as f64;
    let mu = state.mu;
    let psi = state.psi.scale_real(mu.abs().powf(d / 4.0));
    let residual = eigen_residual(&psi, problem);
    let solution = EigenstateSolution {
        psi,
        minimizer: state.psi,
        nu: problem.nu,
        mu,
        delta: state.energy,
        residual,
        gradient_norm: state.gradient_norm,
        iterations,
        history,
    };
    if state.gradient_norm >= tol {
        return Err(Error::NonConvergence { best: Box::new(solution) });
    }
    let expected = match problem.sign {
        Sign::Defocusing => mu < 0.0,
        _ => mu > 0.0,
    };
    if !expected {
        return Err(Error::WrongBranch { mu });
    }
    Ok(solution)
}

/// `||(T + V - nu) psi + s |psi|^{4/d} psi||` with `s = +1` defocusing, `-1` focusing.
pub fn eigen_residual(psi: &Field, problem: &MinimizationProblem) -> f64 {
    let mut op = Operator::new(problem);
    let a = op.apply(psi.values());
    let n = nonlinear_term(psi.values(), problem.grid.dim());
    let s = problem.sign.coefficient();
    let r: Vec<Complex64> = a.iter().zip(&n).map(|(x, y)| x + s * y).collect();
    op.inner(&r, &r).sqrt()
}

/// Solves `H psi ± |psi|^{4/d} psi = nu psi` from the Gaussian start.
pub fn solve_eigenstate(problem: &MinimizationProblem, tol: f64, max_iter: usize) -> Result<EigenstateSolution> {
    minimize(problem, &Field::gaussian(problem.grid, 1.0), tol, max_iter)
}

/// Ground state of `-ΔQ/2 + Q = Q^{1+4/d}`: positive and even (radial in 2-d).
pub fn solve_q(grid: Grid) -> Result<EigenstateSolution> {
    let problem = MinimizationProblem { nu: -1.0, sign: Sign::Focusing, grid, trapped: false };
    let mut sol = minimize(&problem, &Field::gaussian(grid, 1.0), 1e-10, DEFAULT_MAX_ITER)?;
    // The Gaussian start is real and positive; drop the rounding-level imaginary part.
    sol.psi = sol.psi.map(|z| Complex64::new(z.re, 0.0));
    Ok(sol)
}

/// `3^{1/4} sech^{1/2}(2 sqrt(2) x)`, the one-dimensional ground state.
pub fn q_closed_form_1d(x: f64) -> f64 {
    3f64.powf(0.25) / (2.0 * 2f64.sqrt() * x).cosh().sqrt()
}

/// `||Q||_{L^2}` in one dimension, `(sqrt(3) pi / (2 sqrt 2))^{1/2}`.
pub fn q_mass_1d() -> f64 {
    (3f64.sqrt() * std::f64::consts::PI / (2.0 * 2f64.sqrt())).sqrt()
}

/// Ratio of the two sides of the sharp Gagliardo–Nirenberg inequality
/// `||f||_p^p <= (d+2)/(2 d ||Q||^{4/d}) ||f||^{4/d} ||grad f||^2`, `p = 2 + 4/d`.
/// At least one for every `f`, equal to one at `Q`.
pub fn gn_check(f: &Field, q_l2: f64) -> f64 {
    let d = f.grid().dim() as f64;
    let p = 2.0 + 4.0 / d;
    let g = grad_l2(f);
    let rhs = (d + 2.0) / (2.0 * d * q_l2.powf(4.0 / d)) * f.l2().powf(4.0 / d) * g * g;
    rhs / f.lp_integral(p)
}

/// Eigenvalue of the rotating family: `d/2 + 2j - theta/pi` (defocusing) or
/// `d/2 - 2j - theta/pi` (focusing).
pub fn family_nu(dim: usize, j: u32, theta: f64, sign: Sign) -> f64 {
    let base = dim as f64 / 2.0 - theta / std::f64::consts::PI;
    match sign {
        Sign::Focusing => base - 2.0 * j as f64,
        _ => base + 2.0 * j as f64,
    }
}
