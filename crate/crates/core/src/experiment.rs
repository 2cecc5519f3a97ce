//! Reproducible rotation experiments: configuration, reports, persistence and
//! resolution studies.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::eigen;
use crate::error::Result;
use crate::propagator::Sign;
use crate::scattering::{self, DatumOptions};
use crate::spectral::{fourier, grad_l2, io, Field, Grid};

/// Environment variable naming the directory relative output paths resolve against.
pub const OUTPUT_ROOT_ENV: &str = "NLSROT_OUTPUT_ROOT";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Absolute paths are kept; relative ones are placed under [`output_root`].
pub fn resolve_output(path: impl AsRef<Path>) -> PathBuf {
    let path = path.as_ref();
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        output_root().join(path)
    }
}

/// Overwrites the fields of `base` with the keys present in `overrides`.
pub fn merge_json<T: Serialize + for<'de> Deserialize<'de>>(base: &T, overrides: &Value) -> Result<T> {
    let mut value = serde_json::to_value(base)?;
    if let (Value::Object(target), Value::Object(src)) = (&mut value, overrides) {
        for (k, v) in src {
            target.insert(k.clone(), v.clone());
        }
    }
    Ok(serde_json::from_value(value)?)
}

/// Time step giving rotation defects well below `1e-4` at the reference grid.
pub fn default_dt(sign: Sign) -> f64 {
    match sign {
        Sign::Focusing => 2.5e-5,
        _ => 1e-3,
    }
}

fn default_dim() -> usize {
    1
}
fn default_threshold() -> f64 {
    1e-4
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Rotation angles in units of `pi`.
    #[serde(default)]
    pub theta_over_pi: Vec<f64>,
    #[serde(default)]
    pub js: Vec<u32>,
    pub sign: Sign,
    /// Directory for reports and fields; defaults to the experiment name.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub defect_threshold: f64,
    #[serde(default = "default_true")]
    pub write_fields: bool,
}

impl ExperimentConfig {
    pub fn new(name: &str, sign: Sign) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            dim: 1,
            half_width: None,
            points: None,
            dt: None,
            theta_over_pi: Vec::new(),
            js: Vec::new(),
            sign,
            output_dir: None,
            seed: 0,
            defect_threshold: default_threshold(),
            write_fields: true,
        }
    }

    pub fn datum_options(&self) -> DatumOptions {
        let mut o = DatumOptions::reference(self.dim);
        if let Some(l) = self.half_width {
            o.half_width = l;
        }
        if let Some(n) = self.points {
            o.points = n;
        }
        o
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(self.sign))
    }

    pub fn output_dir(&self) -> PathBuf {
        resolve_output(self.output_dir.clone().unwrap_or_else(|| PathBuf::from(&self.name)))
    }
}

/// Outcome of one `(theta, j)` case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationReport {
    pub theta: f64,
    pub j: u32,
    pub nu: f64,
    /// `||S(u_-) - e^{i theta} u_-|| / ||u_-||`.
    pub defect: f64,
    /// `||u_-||_{L^2}`.
    pub l2: f64,
    /// `||grad phi_j||_{L^2}` of the eigenstate.
    pub grad_l2: f64,
    pub mu: f64,
    pub eigen_residual: f64,
    pub l2_defect: f64,
    pub h1_defect: f64,
    /// Focusing only: `(d/(d+2))^{d/4} ||Q||`.
    pub mass_threshold: Option<f64>,
    pub mass_threshold_pass: Option<bool>,
    /// Focusing only: `||grad phi_j||` exceeds that of the next smaller `j` run.
    pub h1_growth_flag: Option<bool>,
    pub passed: bool,
    pub error: Option<String>,
    pub runtime: f64,
}

impl RotationReport {
    fn failed(theta: f64, j: u32, nu: f64, error: String, runtime: f64) -> Self {
        RotationReport {
            theta,
            j,
            nu,
            defect: f64::NAN,
            l2: f64::NAN,
            grad_l2: f64::NAN,
            mu: f64::NAN,
            eigen_residual: f64::NAN,
            l2_defect: f64::NAN,
            h1_defect: f64::NAN,
            mass_threshold: None,
            mass_threshold_pass: None,
            h1_growth_flag: None,
            passed: false,
            error: Some(error),
            runtime,
        }
    }
}

/// `(d/(d+2))^{d/4} ||Q||`, the mass every focusing rotating datum exceeds.
pub fn focusing_mass_threshold(dim: usize) -> Result<f64> {
    let d = dim as f64;
    let q_l2 = match dim {
        1 => eigen::q_mass_1d(),
        _ => eigen::solve_q(Grid::new(dim, 8.0, 128)?)?.psi.l2(),
    };
    Ok((d / (d + 2.0)).powf(d / 4.0) * q_l2)
}

/// One rotation case: eigenstate, datum, lens scattering and report.
pub fn rotation_case(
    theta: f64,
    j: u32,
    cfg: &ExperimentConfig,
    mass_threshold: Option<f64>,
) -> (RotationReport, Option<scattering::RotatingDatum>, Option<Field>) {
    let start = Instant::now();
    let nu = eigen::family_nu(cfg.dim, j, theta, cfg.sign);
    let datum = match scattering::build_rotating_datum(theta, j, cfg.dim, cfg.sign, &cfg.datum_options()) {
        Ok(d) => d,
        Err(e) => {
            return (RotationReport::failed(theta, j, nu, e.to_string(), start.elapsed().as_secs_f64()), None, None)
        }
    };
    let (defect, result) = match scattering::rotation_defect(&datum, cfg.time_step()) {
        Ok(v) => v,
        Err(e) => {
            return (
                RotationReport::failed(theta, j, nu, e.to_string(), start.elapsed().as_secs_f64()),
                Some(datum),
                None,
            )
        }
    };
    let l2 = datum.u_minus.l2();
    let mass_threshold_pass = mass_threshold.map(|m| l2 > m);
    let passed = defect < cfg.defect_threshold && mass_threshold_pass.unwrap_or(true);
    let report = RotationReport {
        theta,
        j,
        nu,
        defect,
        l2,
        grad_l2: grad_l2(&datum.eigen.psi),
        mu: datum.eigen.mu,
        eigen_residual: datum.eigen.residual,
        l2_defect: result.l2_defect,
        h1_defect: result.h1_defect,
        mass_threshold,
        mass_threshold_pass,
        h1_growth_flag: None,
        passed,
        error: None,
        runtime: start.elapsed().as_secs_f64(),
    };
    (report, Some(datum), Some(result.u_plus))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub name: String,
    pub reports: Vec<RotationReport>,
    pub all_passed: bool,
}

/// Runs every `(theta, j)` pair, writes `reports.json` and (optionally) the
/// datum, eigenstate and scattered fields into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let threshold = if cfg.sign == Sign::Focusing && !cfg.theta_over_pi.is_empty() && !cfg.js.is_empty() {
        Some(focusing_mass_threshold(cfg.dim)?)
    } else {
        None
    };
    let mut reports = Vec::new();
    for &t in &cfg.theta_over_pi {
        for &j in &cfg.js {
            let (report, datum, u_plus) = rotation_case(t * PI, j, cfg, threshold);
            if cfg.write_fields {
                let tag = format!("theta{t}_j{j}");
                if let Some(d) = &datum {
                    io::save_field(dir.join(format!("{tag}_eigenstate.field")), &d.eigen.psi, "eigenstate")?;
                    io::save_field(dir.join(format!("{tag}_u_minus.field")), &d.u_minus, "past asymptotic state")?;
                }
                if let Some(u) = &u_plus {
                    io::save_field(dir.join(format!("{tag}_u_plus.field")), u, "future asymptotic state")?;
                }
            }
            reports.push(report);
        }
    }
    if cfg.sign == Sign::Focusing {
        flag_h1_growth(&mut reports);
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let outcome = ExperimentOutcome { name: cfg.name.clone(), reports, all_passed };
    fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&outcome)?)?;
    Ok(outcome)
}

fn flag_h1_growth(reports: &mut [RotationReport]) {
    let mut by_theta: BTreeMap<String, Vec<(u32, f64)>> = BTreeMap::new();
    for r in reports.iter() {
        by_theta.entry(format!("{}", r.theta)).or_default().push((r.j, r.grad_l2));
    }
    for r in reports.iter_mut() {
        let family = &by_theta[&format!("{}", r.theta)];
        let below = family.iter().filter(|(j, _)| *j < r.j).max_by_key(|(j, _)| *j);
        r.h1_growth_flag = Some(match below {
            Some((_, g)) => r.grad_l2 > *g,
            None => true,
        });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionRow {
    pub level: usize,
    pub points: usize,
    pub dt: f64,
    pub theta: f64,
    pub j: u32,
    pub defect: f64,
    /// Defect at the previous level divided by this one.
    pub ratio: Option<f64>,
}

/// Repeats each case at `(N, dt)`, `(2N, dt/2)`, ... for `levels` levels.
/// With `linear` set, the nonlinearity is switched off and the datum is a
/// Gaussian, for which the exact answer is `S = identity`.
pub fn resolution_study(cfg: &ExperimentConfig, levels: usize, linear: bool) -> Result<Vec<ResolutionRow>> {
    let mut rows = Vec::new();
    let base = cfg.datum_options();
    let cases: Vec<(f64, u32)> = if linear {
        vec![(0.0, 0)]
    } else {
        cfg.theta_over_pi.iter().flat_map(|&t| cfg.js.iter().map(move |&j| (t * PI, j))).collect()
    };
    for (theta, j) in cases {
        let mut previous: Option<f64> = None;
        for level in 0..levels {
            let scale = 1usize << level;
            let points = base.points * scale;
            let dt = cfg.time_step() / scale as f64;
            let defect = if linear {
                let grid = Grid::new(cfg.dim, base.half_width, points)?;
                let u = fourier::inverse_fourier(&Field::gaussian(grid, 1.0))?;
                let s = scattering::scattering_lens(&u, Sign::Linear, dt)?;
                s.u_plus.relative_distance(&u)?
            } else {
                let level_cfg = ExperimentConfig { points: Some(points), dt: Some(dt), ..cfg.clone() };
                let (report, _, _) = rotation_case(theta, j, &level_cfg, None);
                report.defect
            };
            rows.push(ResolutionRow { level, points, dt, theta, j, defect, ratio: previous.map(|p| p / defect) });
            previous = Some(defect);
        }
    }
    Ok(rows)
}

/// Writes resolution rows as plot-ready CSV.
pub fn write_resolution_csv(path: impl AsRef<Path>, rows: &[ResolutionRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["level", "points", "dt", "theta", "j", "defect", "ratio"])?;
    for r in rows {
        w.write_record([
            r.level.to_string(),
            r.points.to_string(),
            format!("{:e}", r.dt),
            format!("{}", r.theta),
            r.j.to_string(),
            format!("{:e}", r.defect),
            r.ratio.map(|v| format!("{v}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
