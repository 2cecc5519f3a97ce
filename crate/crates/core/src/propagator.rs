//! Strang split-step integration of
//!
//! ```text
//! i u_t + Δu/2 = V(x) u + s w(t) |u|^{2 sigma} u
//! ```
//!
//! with `V = 0` or `|x|^2/2`, `s` the sign of the nonlinearity and `w` either
//! one or the factor `|cos t|^{d sigma - 2}` of the lens-transformed
//! equation. The linear substep is exact: a Fourier multiplier without
//! potential, the shear factorization of `exp(-i t H)` with it. The pointwise
//! substep is a phase rotation, so every step preserves mass to round-off.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::ShearStep;
use crate::spectral::{fourier, grad_l2, FftWorkspace, Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Defocusing,
    Focusing,
    /// Nonlinearity switched off.
    Linear,
}

impl Sign {
    pub fn coefficient(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
            Sign::Linear => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    None,
    Harmonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlsConfig {
    pub dim: usize,
    pub sigma: f64,
    pub sign: Sign,
    pub potential: Potential,
    /// Weight the nonlinearity by `|cos t|^{d sigma - 2}`.
    #[serde(default)]
    pub time_factor: bool,
}

/// Lower end of the exponent range on which the lens-based scattering theory
/// applies: `(2 - d + sqrt(d^2 + 12 d + 4)) / (4 d)`.
pub fn sigma_lower(dim: usize) -> f64 {
    let d = dim as f64;
    (2.0 - d + (d * d + 12.0 * d + 4.0).sqrt()) / (4.0 * d)
}

/// Largest `|t|` allowed for nonautonomous runs with `sigma != 2/d`.
pub const NONAUTONOMOUS_LIMIT: f64 = FRAC_PI_2 - 0.1;

impl NlsConfig {
    /// Mass-critical equation, `sigma = 2/d`.
    pub fn critical(dim: usize, sign: Sign, potential: Potential) -> Self {
        NlsConfig { dim, sigma: 2.0 / dim as f64, sign, potential, time_factor: false }
    }

    pub fn is_critical(&self) -> bool {
        (self.sigma - 2.0 / self.dim as f64).abs() < 1e-12
    }

    /// Whether `sigma` lies in the range where the scattering operator is
    /// defined on the weighted space.
    pub fn in_scattering_range(&self) -> bool {
        let upper = if self.dim <= 2 { f64::INFINITY } else { 2.0 / (self.dim as f64 - 2.0) };
        self.sigma > sigma_lower(self.dim) && self.sigma < upper
    }

    fn weight(&self, t: f64) -> f64 {
        if self.time_factor && !self.is_critical() {
            t.cos().abs().powf(self.dim as f64 * self.sigma - 2.0)
        } else {
            1.0
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if self.dim != grid.dim() {
            return Err(Error::InvalidProblem(format!("config dimension {} on a {}-d grid", self.dim, grid.dim())));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidProblem(format!("sigma = {} must be positive", self.sigma)));
        }
        Ok(())
    }
}

enum LinearStep {
    Free(Vec<Complex64>),
    Harmonic(ShearStep),
}

/// Precomputed Strang step of fixed length on one grid.
pub struct SplitStepper {
    cfg: NlsConfig,
    h: f64,
    ws: FftWorkspace,
    linear: LinearStep,
}

impl SplitStepper {
    pub fn new(grid: Grid, cfg: NlsConfig, h: f64) -> Result<Self> {
        cfg.validate(&grid)?;
        if !(h.is_finite() && h != 0.0 && h.abs() < 1.0) {
            return Err(Error::InvalidProblem(format!("step {h} must be nonzero and below one")));
        }
        let linear = match cfg.potential {
            Potential::None => LinearStep::Free(
                fourier::frequency_squared(&grid).iter().map(|k| Complex64::from_polar(1.0, -0.5 * h * k)).collect(),
            ),
            Potential::Harmonic => LinearStep::Harmonic(ShearStep::new(&grid, h)),
        };
        Ok(SplitStepper { cfg, h, ws: FftWorkspace::new(grid), linear })
    }

    pub fn step_length(&self) -> f64 {
        self.h
    }

    fn nonlinear(&self, data: &mut [Complex64], t_mid: f64, tau: f64) {
        let c = self.cfg.sign.coefficient() * self.cfg.weight(t_mid) * tau;
        if c == 0.0 {
            return;
        }
        let two_sigma = 2.0 * self.cfg.sigma;
        for v in data.iter_mut() {
            let m = v.norm_sqr();
            let p = if two_sigma == 4.0 {
                m * m
            } else if two_sigma == 2.0 {
                m
            } else {
                m.powf(self.cfg.sigma)
            };
            let (s, co) = (-c * p).sin_cos();
            *v *= Complex64::new(co, s);
        }
    }

    /// Advances `data` from `t` to `t + h`.
    pub fn step(&mut self, data: &mut [Complex64], t: f64) {
        let h = self.h;
        self.nonlinear(data, t + 0.25 * h, 0.5 * h);
        match &self.linear {
            LinearStep::Free(m) => self.ws.apply_multiplier_in_place(data, m),
            LinearStep::Harmonic(s) => s.apply(&mut self.ws, data),
        }
        self.nonlinear(data, t + 0.75 * h, 0.5 * h);
    }
}

/// One Strang step of length `dt` from time `t`.
pub fn step_strang(u: &Field, t: f64, dt: f64, cfg: &NlsConfig) -> Result<Field> {
    let mut stepper = SplitStepper::new(*u.grid(), *cfg, dt)?;
    let mut data = u.values().to_vec();
    stepper.step(&mut data, t);
    let out = Field::new(*u.grid(), data)?;
    if !out.is_finite() {
        return Err(Error::BlowUpDetected(t + dt));
    }
    Ok(out)
}

/// `1/2 ||grad u||^2 + 1/2 || |x| u ||^2 + s w(t) / (sigma + 1) ||u||^{2 sigma + 2}`,
/// the potential term only with the harmonic potential.
pub fn conserved_energy(u: &Field, cfg: &NlsConfig) -> f64 {
    energy_at(u, cfg, 0.0)
}

fn energy_at(u: &Field, cfg: &NlsConfig, t: f64) -> f64 {
    let g = grad_l2(u);
    let mut e = 0.5 * g * g;
    if cfg.potential == Potential::Harmonic {
        let x = crate::spectral::xf_l2(u);
        e += 0.5 * x * x;
    }
    let s = cfg.sign.coefficient();
    if s != 0.0 {
        e += s * cfg.weight(t) / (cfg.sigma + 1.0) * u.lp_integral(2.0 * cfg.sigma + 2.0);
    }
    e
}

/// Growth factor of the sup norm or gradient norm treated as blow-up.
pub const BLOWUP_GROWTH: f64 = 1e6;
/// Fraction of Fourier mass beyond `0.75 xi_max` treated as loss of resolution.
pub const RESOLUTION_LOSS: f64 = 1e-6;
const SPECTRAL_CHECK_EVERY: usize = 16;

#[derive(Clone, Debug, Default)]
pub struct PropagateOptions {
    /// Times (inside the run) at which to keep a copy of the solution; each is
    /// rounded to the nearest step.
    pub checkpoints: Vec<f64>,
    /// Also run at `dt/2` and report the difference.
    pub richardson: bool,
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    /// Solution at `t1`, or the last finite state before blow-up.
    pub field: Field,
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    /// `max_t | ||u(t)||^2 - ||u(t0)||^2 | / ||u(t0)||^2`.
    pub mass_drift: f64,
    /// Relative energy change between `t0` and the final time.
    pub energy_drift: f64,
    pub blew_up: bool,
    pub blowup_time: Option<f64>,
    /// `(4/3) ||u_dt(t1) - u_{dt/2}(t1)||`, the extrapolated error of `field`.
    pub richardson_error: Option<f64>,
    pub steps: usize,
}

/// Fraction of `L^2` mass of `f` carried by frequencies with some component
/// above `0.75 xi_max`.
pub fn high_frequency_fraction(f: &Field) -> f64 {
    let total = f.l2_squared();
    if total == 0.0 {
        return 0.0;
    }
    let fh = match fourier::fourier(f) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let cut = 0.75 * f.grid().max_frequency();
    let dual = *fh.grid();
    let d = dual.dim();
    let high: f64 = fh
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| dual.coords(*i)[..d].iter().any(|k| k.abs() > cut))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    high * dual.cell_volume() / total
}

pub fn propagate(u0: &Field, t0: f64, t1: f64, cfg: &NlsConfig, dt: f64) -> Result<PropagationResult> {
    propagate_with(u0, t0, t1, cfg, dt, &PropagateOptions::default())
}

pub fn propagate_with(
    u0: &Field,
    t0: f64,
    t1: f64,
    cfg: &NlsConfig,
    dt: f64,
    opts: &PropagateOptions,
) -> Result<PropagationResult> {
    let mut result = run(u0, t0, t1, cfg, dt, &opts.checkpoints)?;
    if opts.richardson && !result.blew_up {
        let fine = run(u0, t0, t1, cfg, 0.5 * dt, &[])?;
        result.richardson_error =
            Some(if fine.blew_up { f64::INFINITY } else { 4.0 / 3.0 * result.field.distance(&fine.field)? });
    }
    Ok(result)
}

fn run(u0: &Field, t0: f64, t1: f64, cfg: &NlsConfig, dt: f64, checkpoints: &[f64]) -> Result<PropagationResult> {
    u0.check_finite()?;
    if t1 == t0 {
        return Err(Error::InvalidProblem("t1 equals t0".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidProblem(format!("dt = {dt} must be positive")));
    }
    if cfg.time_factor && !cfg.is_critical() && t0.abs().max(t1.abs()) > NONAUTONOMOUS_LIMIT + 1e-12 {
        return Err(Error::InvalidProblem(format!(
            "nonautonomous runs are restricted to |t| <= {NONAUTONOMOUS_LIMIT:.4}"
        )));
    }
    let grid = *u0.grid();
    let steps = ((t1 - t0).abs() / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut stepper = SplitStepper::new(grid, *cfg, h)?;

    let mut marks: Vec<(usize, f64)> =
        checkpoints.iter().map(|&c| (((c - t0) / h).round().clamp(0.0, steps as f64) as usize, c)).collect();
    marks.sort_by_key(|m| m.0);
    let mut next_mark = 0;
    let mut times = Vec::new();
    let mut snapshots = Vec::new();

    let mass0 = u0.l2_squared();
    let linf0 = u0.linf();
    let grad0 = grad_l2(u0);
    let hf0 = high_frequency_fraction(u0);
    let energy0 = energy_at(u0, cfg, t0);

    let mut data = u0.values().to_vec();
    let mut last_good = data.clone();
    let mut mass_drift: f64 = 0.0;
    let mut blowup_time = None;

    let mut record = |k: usize, data: &[Complex64], times: &mut Vec<f64>, snaps: &mut Vec<Field>| {
        while next_mark < marks.len() && marks[next_mark].0 == k {
            times.push(t0 + k as f64 * h);
            snaps.push(Field::new(grid, data.to_vec()).expect("same length"));
            next_mark += 1;
        }
    };
    record(0, &data, &mut times, &mut snapshots);

    for k in 0..steps {
        let t = t0 + k as f64 * h;
        stepper.step(&mut data, t);
        let t_next = t + h;
        let mut sup: f64 = 0.0;
        let mut mass = 0.0;
        let mut finite = true;
        for v in &data {
            let m = v.norm_sqr();
            finite &= m.is_finite();
            sup = sup.max(m);
            mass += m;
        }
        mass *= grid.cell_volume();
        let sup = sup.sqrt();
        let mut blown = !finite || (linf0 > 0.0 && sup > BLOWUP_GROWTH * linf0);
        if !blown && mass0 > 0.0 && (k + 1) % SPECTRAL_CHECK_EVERY == 0 {
            let f = Field::new(grid, data.clone())?;
            let hf = high_frequency_fraction(&f);
            blown = grad_l2(&f) > BLOWUP_GROWTH * grad0 || (hf > RESOLUTION_LOSS && hf > 10.0 * hf0);
        }
        if blown {
            blowup_time = Some(t_next);
            break;
        }
        if mass0 > 0.0 {
            mass_drift = mass_drift.max((mass - mass0).abs() / mass0);
        }
        if (k + 1) % SPECTRAL_CHECK_EVERY == 0 {
            last_good.copy_from_slice(&data);
        }
        record(k + 1, &data, &mut times, &mut snapshots);
    }

    let blew_up = blowup_time.is_some();
    let field = Field::new(grid, if blew_up { last_good } else { data })?;
    let t_end = if blew_up { t0 } else { t1 };
    let energy_drift = if blew_up {
        f64::NAN
    } else {
        let e1 = energy_at(&field, cfg, t_end);
        if energy0 != 0.0 {
            (e1 - energy0).abs() / energy0.abs()
        } else {
            (e1 - energy0).abs()
        }
    };
    Ok(PropagationResult {
        field,
        times,
        snapshots,
        mass_drift,
        energy_drift,
        blew_up,
        blowup_time,
        richardson_error: None,
        steps,
    })
}

/// Equations exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Free,
    Focusing,
    Harmonic,
    HarmonicFocusing,
}

impl Equation {
    pub fn config(self, dim: usize, sigma: Option<f64>) -> NlsConfig {
        let (sign, potential) = match self {
            Equation::Free => (Sign::Defocusing, Potential::None),
            Equation::Focusing => (Sign::Focusing, Potential::None),
            Equation::Harmonic => (Sign::Defocusing, Potential::Harmonic),
            Equation::HarmonicFocusing => (Sign::Focusing, Potential::Harmonic),
        };
        let mut cfg = NlsConfig::critical(dim, sign, potential);
        if let Some(s) = sigma {
            cfg.sigma = s;
            cfg.time_factor = potential == Potential::Harmonic && !cfg.is_critical();
        }
        cfg
    }
}
