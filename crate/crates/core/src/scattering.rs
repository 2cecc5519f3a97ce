//! The scattering operator `S = W_+^{-1} W_-` and the wave operators, computed
//! through the lens transform on the finite interval `[-pi/2, pi/2]`.
//!
//! With `v` the lens transform of a solution `u` of the mass-critical
//! equation, the asymptotic states sit at the endpoints:
//!
//! ```text
//! v(-pi/2, x) = exp(i d pi/4) F(u_-)(-x),      v(pi/2, x) = exp(-i d pi/4) F(u_+)(x).
//! ```
//!
//! Fields on a grid `G` are sent to the harmonic side on `G.dual()`, and back.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, EigenstateSolution, MinimizationProblem};
use crate::error::{Error, Result};
use crate::free::propagate_u0;
use crate::harmonic::{propagate_shear, HermiteBasis};
use crate::propagator::{self, NlsConfig, Potential, PropagateOptions, PropagationResult, Sign};
use crate::spectral::{fourier, grad_l2, Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lens,
    Direct,
}

#[derive(Clone, Debug)]
pub struct ScatteringResult {
    pub u_plus: Field,
    pub method: Method,
    /// Lens route: Richardson estimate in `dt`, when requested. Direct route:
    /// distance between the results at `T` and `T/2`.
    pub discretization_estimate: Option<f64>,
    pub cross_check_gap: Option<f64>,
    /// `| ||u_+|| - ||u_-|| | / ||u_-||`.
    pub l2_defect: f64,
    /// `| ||grad u_+|| - ||grad u_-|| | / ||grad u_-||`.
    pub h1_defect: f64,
    pub mass_drift: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        (a - b).abs() / b
    } else {
        (a - b).abs()
    }
}

impl ScatteringResult {
    fn new(u_minus: &Field, u_plus: Field, method: Method, mass_drift: f64) -> Self {
        ScatteringResult {
            l2_defect: relative_gap(u_plus.l2(), u_minus.l2()),
            h1_defect: relative_gap(grad_l2(&u_plus), grad_l2(u_minus)),
            u_plus,
            method,
            discretization_estimate: None,
            cross_check_gap: None,
            mass_drift,
        }
    }
}

fn phase(dim: usize) -> Complex64 {
    Complex64::from_polar(1.0, dim as f64 * FRAC_PI_4)
}

/// `v(-pi/2) = exp(i d pi/4) F(u_-)(-x)`, on the dual grid.
pub fn endpoint_from_past(u_minus: &Field) -> Result<Field> {
    Ok(fourier::fourier(u_minus)?.reflect().scale(phase(u_minus.grid().dim())))
}

/// Inverse of [`endpoint_from_past`].
pub fn past_from_endpoint(v: &Field) -> Result<Field> {
    fourier::inverse_fourier(&v.reflect().scale(phase(v.grid().dim()).conj()))
}

/// `u_+ = exp(i d pi/4) F^{-1}(v(pi/2))`.
pub fn future_from_endpoint(v: &Field) -> Result<Field> {
    Ok(fourier::inverse_fourier(v)?.scale(phase(v.grid().dim())))
}

/// Inverse of [`future_from_endpoint`].
pub fn endpoint_from_future(u_plus: &Field) -> Result<Field> {
    Ok(fourier::fourier(u_plus)?.scale(phase(u_plus.grid().dim()).conj()))
}

/// Harmonic equation across `[s0, s1]`; blow-up is an error here.
fn harmonic_run(v: &Field, s0: f64, s1: f64, sign: Sign, dt: f64, richardson: bool) -> Result<PropagationResult> {
    let cfg = NlsConfig::critical(v.grid().dim(), sign, Potential::Harmonic);
    harmonic_run_with(v, s0, s1, &cfg, dt, richardson)
}

fn harmonic_run_with(
    v: &Field,
    s0: f64,
    s1: f64,
    cfg: &NlsConfig,
    dt: f64,
    richardson: bool,
) -> Result<PropagationResult> {
    let opts = PropagateOptions { richardson, ..Default::default() };
    let r = propagator::propagate_with(v, s0, s1, cfg, dt, &opts)?;
    if let Some(t) = r.blowup_time {
        return Err(Error::BlowUpOnLensInterval(t));
    }
    Ok(r)
}

/// `S(u_-)` by propagating the lens-transformed equation from `-pi/2` to `pi/2`.
pub fn scattering_lens(u_minus: &Field, sign: Sign, dt: f64) -> Result<ScatteringResult> {
    let cfg = NlsConfig::critical(u_minus.grid().dim(), sign, Potential::Harmonic);
    scattering_lens_with(u_minus, &cfg, dt, false)
}

/// [`scattering_lens`] with an explicit equation and optional Richardson estimate.
pub fn scattering_lens_with(u_minus: &Field, cfg: &NlsConfig, dt: f64, richardson: bool) -> Result<ScatteringResult> {
    if !cfg.is_critical() {
        return Err(Error::UnsupportedExponent { sigma: cfg.sigma, required: 2.0 / cfg.dim as f64 });
    }
    let cfg = NlsConfig { potential: Potential::Harmonic, time_factor: false, ..*cfg };
    let v0 = endpoint_from_past(u_minus)?;
    let run = harmonic_run_with(&v0, -FRAC_PI_2, FRAC_PI_2, &cfg, dt, richardson)?;
    let u_plus = future_from_endpoint(&run.field)?;
    let mut out = ScatteringResult::new(u_minus, u_plus, Method::Lens, run.mass_drift);
    out.discretization_estimate = run.richardson_error;
    Ok(out)
}

/// `W_-(u_-)`: the solution at `t = 0` with past asymptotic state `u_-`.
pub fn wave_minus(u_minus: &Field, sign: Sign, dt: f64) -> Result<Field> {
    let v0 = endpoint_from_past(u_minus)?;
    Ok(harmonic_run(&v0, -FRAC_PI_2, 0.0, sign, dt, false)?.field)
}

/// `W_+(u_+)`: the solution at `t = 0` with future asymptotic state `u_+`.
pub fn wave_plus(u_plus: &Field, sign: Sign, dt: f64) -> Result<Field> {
    let v1 = endpoint_from_future(u_plus)?;
    Ok(harmonic_run(&v1, FRAC_PI_2, 0.0, sign, dt, false)?.field)
}

/// `W_-^{-1}(phi)`: past asymptotic state of the solution equal to `phi` at `t = 0`.
pub fn wave_minus_inverse(phi: &Field, sign: Sign, dt: f64) -> Result<Field> {
    let v = harmonic_run(phi, 0.0, -FRAC_PI_2, sign, dt, false)?.field;
    past_from_endpoint(&v)
}

/// `W_+^{-1}(phi)`: future asymptotic state of the solution equal to `phi` at `t = 0`.
pub fn wave_plus_inverse(phi: &Field, sign: Sign, dt: f64) -> Result<Field> {
    let v = harmonic_run(phi, 0.0, FRAC_PI_2, sign, dt, false)?.field;
    future_from_endpoint(&v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectOptions {
    /// Half-length `T` of the time window `[-T, T]`.
    pub horizon: f64,
    pub dt: f64,
    /// Return `2 S_T - S_{T/2}` instead of `S_T`, cancelling the leading
    /// `1/T` truncation error.
    pub extrapolate: bool,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions { horizon: 80.0, dt: 0.01, extrapolate: false }
    }
}

/// Grid large enough to hold the direct run with the default options.
pub fn direct_grid(dim: usize) -> Grid {
    match dim {
        1 => Grid::line(480.0, 4096),
        _ => Grid::new(2, 160.0, 512).expect("valid grid"),
    }
}

fn direct_once(u_minus: &Field, sign: Sign, horizon: f64, dt: f64) -> Result<(Field, f64)> {
    let cfg = NlsConfig::critical(u_minus.grid().dim(), sign, Potential::None);
    let start = propagate_u0(u_minus, -horizon);
    let r = propagator::propagate(&start, -horizon, horizon, &cfg, dt)?;
    if let Some(t) = r.blowup_time {
        return Err(Error::BlowUpDetected(t));
    }
    Ok((propagate_u0(&r.field, -horizon), r.mass_drift))
}

/// `S(u_-) ≈ U_0(-T) u(T)` with `u(-T) = U_0(-T) u_-`, on the grid of `u_minus`.
pub fn scattering_direct(u_minus: &Field, sign: Sign, opts: &DirectOptions) -> Result<ScatteringResult> {
    if !(opts.horizon > 0.0) {
        return Err(Error::SingularTime(opts.horizon));
    }
    let (full, drift) = direct_once(u_minus, sign, opts.horizon, opts.dt)?;
    let (half, _) = direct_once(u_minus, sign, 0.5 * opts.horizon, opts.dt)?;
    let gap = full.distance(&half)?;
    let u_plus = if opts.extrapolate { full.scale_real(2.0).sub(&half)? } else { full };
    let mut out = ScatteringResult::new(u_minus, u_plus, Method::Direct, drift);
    out.discretization_estimate = Some(gap);
    Ok(out)
}

/// Runs both routes and records their `L^2` gap on the grid of `u_minus`.
/// The direct route runs on `direct` and is resampled back.
pub fn cross_check(
    u_minus: &Field,
    sign: Sign,
    lens_dt: f64,
    direct: &Grid,
    opts: &DirectOptions,
) -> Result<(ScatteringResult, ScatteringResult)> {
    let mut lens = scattering_lens(u_minus, sign, lens_dt)?;
    let wide = fourier::resample(u_minus, direct)?;
    let mut far = scattering_direct(&wide, sign, opts)?;
    let back = fourier::resample(&far.u_plus, u_minus.grid())?;
    let gap = back.distance(&lens.u_plus)?;
    lens.cross_check_gap = Some(gap);
    far.cross_check_gap = Some(gap);
    Ok((lens, far))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumOptions {
    pub half_width: f64,
    pub points: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl DatumOptions {
    pub fn reference(dim: usize) -> Self {
        match dim {
            1 => DatumOptions {
                half_width: 12.0,
                points: 1024,
                tol: eigen::DEFAULT_TOL,
                max_iter: eigen::DEFAULT_MAX_ITER,
            },
            _ => DatumOptions {
                half_width: 8.0,
                points: 128,
                tol: eigen::DEFAULT_TOL,
                max_iter: eigen::DEFAULT_MAX_ITER,
            },
        }
    }
}

/// A datum `u_-` with `S(u_-) = exp(i theta) u_-`, built from an eigenstate.
#[derive(Clone, Debug)]
pub struct RotatingDatum {
    pub theta: f64,
    pub j: u32,
    pub nu: f64,
    pub sign: Sign,
    pub eigen: EigenstateSolution,
    /// `v(-pi/2) = exp(i nu pi/2) phi`, on the eigenstate grid.
    pub endpoint: Field,
    /// On the dual of the eigenstate grid.
    pub u_minus: Field,
}

pub fn build_rotating_datum(theta: f64, j: u32, dim: usize, sign: Sign, opts: &DatumOptions) -> Result<RotatingDatum> {
    if !(0.0..2.0 * PI).contains(&theta) {
        return Err(Error::InvalidProblem(format!("theta = {theta} outside [0, 2 pi)")));
    }
    if j == 0 {
        return Err(Error::InvalidProblem("j must be at least 1".into()));
    }
    if sign == Sign::Linear {
        return Err(Error::InvalidProblem("rotating data need a nonlinearity".into()));
    }
    let grid = Grid::new(dim, opts.half_width, opts.points)?;
    let nu = eigen::family_nu(dim, j, theta, sign);
    let problem = MinimizationProblem::new(nu, sign, grid);
    let sol = eigen::solve_eigenstate(&problem, opts.tol, opts.max_iter)?;
    let endpoint = sol.psi.rotate(nu * FRAC_PI_2);
    let u_minus = fourier::inverse_fourier(&sol.psi)?.rotate(nu * FRAC_PI_2 - dim as f64 * FRAC_PI_4);
    Ok(RotatingDatum { theta, j, nu, sign, eigen: sol, endpoint, u_minus })
}

/// `||S(u_-) - exp(i theta) u_-|| / ||u_-||` together with the run itself.
pub fn rotation_defect(datum: &RotatingDatum, dt: f64) -> Result<(f64, ScatteringResult)> {
    let s = scattering_lens(&datum.u_minus, datum.sign, dt)?;
    let target = datum.u_minus.rotate(datum.theta);
    Ok((s.u_plus.relative_distance(&target)?, s))
}

/// Periodicity condition on the harmonic side:
/// `||v(pi/2) - exp(-i d pi/2 + i theta) v(-pi/2, -x)|| / ||v(-pi/2)||`.
pub fn endpoint_condition_defect(datum: &RotatingDatum, dt: f64) -> Result<f64> {
    let run = harmonic_run(&datum.endpoint, -FRAC_PI_2, FRAC_PI_2, datum.sign, dt, false)?;
    let d = datum.endpoint.grid().dim() as f64;
    let target = datum.endpoint.reflect().rotate(-d * FRAC_PI_2 + datum.theta);
    run.field.relative_distance(&target)
}

/// Rotation defects for the family obtained by shifting the lens interval by
/// each of `shifts`. For standing waves the data differ by a constant phase.
pub fn time_shift_defects(datum: &RotatingDatum, shifts: &[f64], dt: f64) -> Result<Vec<f64>> {
    shifts
        .iter()
        .map(|&tau| {
            let u = past_from_endpoint(&datum.endpoint.rotate(-datum.nu * tau))?;
            let s = scattering_lens(&u, datum.sign, dt)?;
            s.u_plus.relative_distance(&u.rotate(datum.theta))
        })
        .collect()
}

/// First-order coefficient `P(u)` of the small-data expansion
/// `S(eps u) = eps u - i eps^{1+4/d} P(u) + O(eps^{1+8/d})`.
#[derive(Clone, Debug)]
pub struct PerturbativeTerm {
    pub field: Field,
    /// Number of Simpson intervals used.
    pub intervals: usize,
    /// Relative change at the last doubling.
    pub change: f64,
}

fn critical_power(v: &Field) -> Field {
    let d = v.grid().dim();
    v.map(|z| {
        let m = z.norm_sqr();
        z * if d == 1 { m * m } else { m.powf(2.0 / d as f64) }
    })
}

/// `P(u) = int_R U_0(-t) g(U_0(t) u) dt`, `g(w) = |w|^{4/d} w`, evaluated in lens
/// variables as `int_{-pi/2}^{pi/2} U_H(-s) g(U_H(s) u) ds` by composite Simpson
/// with interval doubling until the relative change is below `tol`.
pub fn perturbative_p(u: &Field, tol: f64) -> Result<PerturbativeTerm> {
    u.check_finite()?;
    if u.l2() == 0.0 {
        return Ok(PerturbativeTerm { field: Field::zeros(*u.grid()), intervals: 0, change: 0.0 });
    }
    let integrand = |s: f64| propagate_shear(&critical_power(&propagate_shear(u, s)), -s);
    let a = -FRAC_PI_2;
    let mut n = 16usize;
    let mut nodes: Vec<Field> = (0..=n).map(|k| integrand(a + PI * k as f64 / n as f64)).collect();
    let simpson = |nodes: &[Field]| -> Result<Field> {
        let n = nodes.len() - 1;
        let h = PI / n as f64;
        let mut acc = Field::zeros(*u.grid());
        for (k, f) in nodes.iter().enumerate() {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc = acc.add(&f.scale_real(w * h / 3.0))?;
        }
        Ok(acc)
    };
    let mut current = simpson(&nodes)?;
    loop {
        let mut refined = Vec::with_capacity(2 * n + 1);
        for k in 0..n {
            refined.push(nodes[k].clone());
            refined.push(integrand(a + PI * (k as f64 + 0.5) / n as f64));
        }
        refined.push(nodes[n].clone());
        n *= 2;
        nodes = refined;
        let next = simpson(&nodes)?;
        let change = next.relative_distance(&current)?;
        current = next;
        if change <= tol {
            return Ok(PerturbativeTerm { field: current, intervals: n, change });
        }
        if n >= 1 << 14 {
            return Err(Error::Truncation(format!("quadrature stalled at relative change {change:.3e}")));
        }
    }
}

/// Time-domain evaluation of `P(u)` on `[-T, T]` with step `h`, plus the
/// far-field tail `2 sin(|x|^2/(2T)) / (|x|^2/2) k(x)`, `k = F^{-1}(g(F u))`.
/// The box must hold `U_0(±T) u`.
pub fn perturbative_p_direct(u: &Field, horizon: f64, h: f64) -> Result<Field> {
    u.check_finite()?;
    if !(horizon > 0.0) {
        return Err(Error::SingularTime(horizon));
    }
    let n = 2 * ((horizon / h).ceil() as usize).max(1);
    let step = 2.0 * horizon / n as f64;
    let mut acc = Field::zeros(*u.grid());
    for k in 0..=n {
        let t = -horizon + k as f64 * step;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let f = propagate_u0(&critical_power(&propagate_u0(u, t)), -t);
        acc = acc.add(&f.scale_real(w * step / 3.0))?;
    }
    let k = fourier::inverse_fourier(&critical_power(&fourier::fourier(u)?))?;
    let r2 = u.grid().radius_squared();
    let tail: Vec<Complex64> = k
        .values()
        .iter()
        .zip(&r2)
        .map(|(v, r)| {
            let a = 0.5 * r;
            let w = if a * 1e8 < horizon { 2.0 / horizon } else { 2.0 * (a / horizon).sin() / a };
            v * w
        })
        .collect();
    acc.add(&Field::new(*u.grid(), tail)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub epsilons: Vec<f64>,
    pub p_norm: f64,
    /// `||S(eps u) - eps u|| / eps^{1+4/d} / ||P(u)||`.
    pub ratios: Vec<f64>,
    /// `||S(eps u) - eps u + i eps^{1+4/d} P(u)||`.
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log eps`.
    pub slope: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Compares `S(eps u)` against its first-order expansion for each `eps`.
pub fn expansion_study(u: &Field, epsilons: &[f64], dt: f64) -> Result<ExpansionReport> {
    let p = perturbative_p(u, 1e-8)?.field;
    let p_norm = p.l2();
    let power = 1.0 + 4.0 / u.grid().dim() as f64;
    let mut ratios = Vec::new();
    let mut residuals = Vec::new();
    for &eps in epsilons {
        let data = u.scale_real(eps);
        let s = scattering_lens(&data, Sign::Defocusing, dt)?.u_plus;
        let diff = s.sub(&data)?;
        ratios.push(diff.l2() / eps.powf(power) / p_norm);
        let predicted = p.scale(Complex64::new(0.0, eps.powf(power)));
        residuals.push(diff.add(&predicted)?.l2());
    }
    let lx: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let slope = fit_slope(&lx, &ly);
    Ok(ExpansionReport { epsilons: epsilons.to_vec(), p_norm, ratios, residuals, slope })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `||S(e^{i eta} u) - e^{i eta} S(u)|| / ||u||`.
    pub gauge: f64,
    /// `||S(tau_a u) - tau_a S(u)|| / ||u||` for a whole-grid shift `tau_a`.
    pub translation: f64,
    /// `max_± ||W_±(u) - conj W_∓(conj u)|| / ||u||`.
    pub conjugation: f64,
    /// `max_± ||F W_±^{-1}(u) - W_∓(F u)|| / ||u||`.
    pub fourier_intertwining: f64,
}

impl IdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.gauge.max(self.translation).max(self.conjugation).max(self.fourier_intertwining)
    }
}

/// Boundary content, relative to `||u||`, tolerated before a whole-grid shift
/// is refused for wrapping mass around the periodic box.
pub const WRAP_TOL: f64 = 1e-10;

/// Checks the algebraic identities of the defocusing scattering theory on `u`.
pub fn identity_suite(u: &Field, eta: f64, shift: [isize; 2], dt: f64) -> Result<IdentityReport> {
    let sign = Sign::Defocusing;
    let norm = u.l2().max(f64::MIN_POSITIVE);
    let s = scattering_lens(u, sign, dt)?.u_plus;
    let width = shift.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0).max(1);
    let wrapped = s.boundary_mass(width).max(u.boundary_mass(width)).sqrt() / norm;
    if wrapped > WRAP_TOL {
        return Err(Error::Truncation(format!(
            "relative amplitude {wrapped:.2e} within {width} cells of the boundary would wrap under the shift; enlarge the box"
        )));
    }

    let gauge = scattering_lens(&u.rotate(eta), sign, dt)?.u_plus.distance(&s.rotate(eta))? / norm;
    let translation = scattering_lens(&u.shift(shift), sign, dt)?.u_plus.distance(&s.shift(shift))? / norm;

    let c_plus = wave_plus(u, sign, dt)?.distance(&wave_minus(&u.conj(), sign, dt)?.conj())?;
    let c_minus = wave_minus(u, sign, dt)?.distance(&wave_plus(&u.conj(), sign, dt)?.conj())?;
    let conjugation = c_plus.max(c_minus) / norm;

    let fu = fourier::fourier(u)?;
    let f_plus = fourier::fourier(&wave_plus_inverse(u, sign, dt)?)?.distance(&wave_minus(&fu, sign, dt)?)?;
    let f_minus = fourier::fourier(&wave_minus_inverse(u, sign, dt)?)?.distance(&wave_plus(&fu, sign, dt)?)?;
    let fourier_intertwining = f_plus.max(f_minus) / norm;

    Ok(IdentityReport { gauge, translation, conjugation, fourier_intertwining })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub perturbation_sizes: Vec<f64>,
    pub blowups: usize,
    pub no_blowup_fraction: f64,
    pub max_mass_drift: f64,
}

/// Highest Hermite degree used for stability perturbations.
pub const PERTURBATION_DEGREE: usize = 10;

/// Seeded random combination of low Hermite modes with `L^2` norm in
/// `[epsilon/2, epsilon)`.
pub fn random_perturbation(basis: &HermiteBasis, epsilon: f64, rng: &mut ChaCha8Rng) -> Field {
    let coefficients: Vec<Complex64> =
        (0..basis.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let f = basis.synthesize(&coefficients);
    let size = epsilon * (0.5 + 0.5 * rng.gen::<f64>());
    let n = f.l2();
    if n > 0.0 {
        f.scale_real(size / n)
    } else {
        f
    }
}

/// Perturbs the endpoint datum and runs the harmonic equation across the
/// lens interval for each trial, counting blow-up flags.
pub fn stability_probe(
    endpoint: &Field,
    sign: Sign,
    epsilon: f64,
    trials: usize,
    seed: u64,
    dt: f64,
) -> Result<StabilityReport> {
    let basis = HermiteBasis::build(*endpoint.grid(), PERTURBATION_DEGREE)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = NlsConfig::critical(endpoint.grid().dim(), sign, Potential::Harmonic);
    let mut sizes = Vec::with_capacity(trials);
    let mut blowups = 0;
    let mut max_mass_drift: f64 = 0.0;
    for _ in 0..trials {
        let p =
            if epsilon > 0.0 { random_perturbation(&basis, epsilon, &mut rng) } else { Field::zeros(*endpoint.grid()) };
        sizes.push(p.l2());
        let run = propagator::propagate(&endpoint.add(&p)?, -FRAC_PI_2, FRAC_PI_2, &cfg, dt)?;
        if run.blew_up {
            blowups += 1;
        } else {
            max_mass_drift = max_mass_drift.max(run.mass_drift);
        }
    }
    let no_blowup_fraction = if trials > 0 { (trials - blowups) as f64 / trials as f64 } else { 1.0 };
    Ok(StabilityReport {
        epsilon,
        trials,
        seed,
        perturbation_sizes: sizes,
        blowups,
        no_blowup_fraction,
        max_mass_drift,
    })
}
