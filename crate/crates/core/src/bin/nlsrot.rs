use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use nls_rotation::eigen::{self, MinimizationProblem};
use nls_rotation::experiment::{self, ExperimentConfig};
use nls_rotation::propagator::{self, Equation, PropagateOptions, Sign};
use nls_rotation::scattering::{self, DatumOptions, DirectOptions};
use nls_rotation::spectral::{fourier, grad_l2, io, Field, Grid};
use nls_rotation::{Error, Result};

/// Rotating points of the mass-critical NLS scattering operator.
///
/// Relative output paths are written under `$NLSROT_OUTPUT_ROOT` (default: the
/// working directory).
#[derive(Parser)]
#[command(name = "nlsrot", version)]
struct Cli {
    /// JSON file whose keys provide defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the nonlinear eigenvalue problem for one eigenvalue.
    Eigenstate(EigenstateArgs),
    /// Run the split-step solver between two times.
    Propagate(PropagateArgs),
    /// Apply the scattering operator to a datum.
    Scatter(ScatterArgs),
    /// Build rotating data and measure their rotation defects.
    RotateCheck(ExperimentArgs),
    /// Compare small-data scattering with its first-order expansion.
    Perturbation(PerturbationArgs),
    /// Perturb a rotating datum and look for blow-up.
    Stability(StabilityArgs),
    /// Repeat rotation checks under grid and time-step refinement.
    ResolutionStudy(ResolutionArgs),
    /// Check gauge, translation, conjugation and Fourier identities.
    IdentitySuite(IdentityArgs),
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown sign {s:?}"))
}

fn parse_equation(s: &str) -> std::result::Result<Equation, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown equation {s:?}"))
}

#[derive(Args, Serialize, Deserialize)]
struct GridArgs {
    #[arg(long, visible_alias = "d", default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// `L,N`; takes precedence over --half-width and --points.
    #[arg(long = "grid", value_parser = parse_box)]
    #[serde(skip)]
    grid_box: Option<(f64, usize)>,
}

fn parse_box(s: &str) -> std::result::Result<(f64, usize), String> {
    let (l, n) = s.split_once(',').ok_or_else(|| format!("expected L,N, got {s:?}"))?;
    let l = l.trim().parse().map_err(|_| format!("bad half-width {l:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad point count {n:?}"))?;
    Ok((l, n))
}

impl GridArgs {
    fn datum_options(&self) -> DatumOptions {
        let mut o = DatumOptions::reference(self.dim);
        if let Some(l) = self.half_width {
            o.half_width = l;
        }
        if let Some(n) = self.points {
            o.points = n;
        }
        if let Some((l, n)) = self.grid_box {
            o.half_width = l;
            o.points = n;
        }
        o
    }

    fn grid(&self) -> Result<Grid> {
        let o = self.datum_options();
        Grid::new(self.dim, o.half_width, o.points)
    }
}

#[derive(Args, Serialize, Deserialize)]
struct EigenstateArgs {
    /// Eigenvalue; otherwise taken from --theta-over-pi and --j.
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta_over_pi: f64,
    #[arg(long, default_value_t = 1)]
    j: u32,
    #[arg(long, value_parser = parse_sign, default_value = "defocusing")]
    sign: Sign,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = eigen::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = eigen::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Field file for the eigenstate; a `.json` sidecar is written next to it.
    #[arg(long, visible_alias = "out", default_value = "eigenstate.field")]
    output: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct PropagateArgs {
    #[arg(long, visible_alias = "eq", value_parser = parse_equation, default_value = "harmonic")]
    equation: Equation,
    /// Nonlinearity exponent; defaults to the mass-critical `2/d`.
    #[arg(long)]
    sigma: Option<f64>,
    /// Initial field file; otherwise a Gaussian of amplitude --amplitude.
    #[arg(long, visible_alias = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    t1: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    checkpoints: Vec<f64>,
    #[arg(long)]
    richardson: bool,
    #[arg(long, visible_alias = "out", default_value = "propagated.field")]
    output: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct ScatterArgs {
    /// Past asymptotic state; otherwise a Gaussian of amplitude --amplitude.
    #[arg(long, visible_alias = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, value_parser = parse_sign, default_value = "defocusing")]
    sign: Sign,
    /// `lens`, `direct` or `both`.
    #[arg(long, default_value = "lens")]
    method: String,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long)]
    richardson: bool,
    /// Direct route: half-length of the time window.
    #[arg(long, default_value_t = 80.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    direct_dt: f64,
    #[arg(long)]
    extrapolate: bool,
    #[arg(long, visible_alias = "out", default_value = "u_plus.field")]
    output: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct ExperimentArgs {
    #[arg(long, default_value = "rotate-check")]
    name: String,
    #[arg(long, value_parser = parse_sign, default_value = "defocusing")]
    sign: Sign,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    theta_over_pi: Vec<f64>,
    #[arg(long, visible_alias = "j", value_delimiter = ',', default_value = "1,2")]
    js: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    defect_threshold: f64,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Skip writing field files.
    #[arg(long = "no-fields", action = clap::ArgAction::SetFalse)]
    write_fields: bool,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            name: self.name.clone(),
            dim: self.dim,
            half_width: self.half_width,
            points: self.points,
            dt: self.dt,
            theta_over_pi: self.theta_over_pi.clone(),
            js: self.js.clone(),
            sign: self.sign,
            output_dir: self.output_dir.clone(),
            seed: self.seed,
            defect_threshold: self.defect_threshold,
            write_fields: self.write_fields,
        }
    }
}

#[derive(Args, Serialize, Deserialize)]
struct ResolutionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Linear Gaussian test, whose exact answer is the identity.
    #[arg(long)]
    linear: bool,
}

#[derive(Args, Serialize, Deserialize)]
struct PerturbationArgs {
    #[arg(long, visible_alias = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, visible_alias = "eps-list", value_delimiter = ',', default_value = "0.1,0.15,0.2,0.3")]
    epsilons: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, visible_alias = "out", default_value = "perturbation.json")]
    output: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct StabilityArgs {
    #[arg(long, default_value_t = 0.0)]
    theta_over_pi: f64,
    #[arg(long, default_value_t = 1)]
    j: u32,
    #[arg(long, value_parser = parse_sign, default_value = "defocusing")]
    sign: Sign,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, visible_alias = "eps", default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, visible_alias = "out", default_value = "stability.json")]
    output: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct IdentityArgs {
    #[arg(long, visible_alias = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = PI / 3.0)]
    eta: f64,
    #[arg(long, default_value_t = 20, allow_hyphen_values = true)]
    shift: isize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    #[arg(long, visible_alias = "out", default_value = "identities.json")]
    output: PathBuf,
}

/// Flags typed on the command line win over the config file, which wins over
/// built-in defaults.
fn layered<T: Serialize + DeserializeOwned>(cli: T, matches: &ArgMatches, config: &Option<Value>) -> Result<T> {
    let Some(Value::Object(file)) = config else {
        return Ok(cli);
    };
    let Value::Object(mut merged) = serde_json::to_value(&cli)? else {
        return Ok(cli);
    };
    for (k, v) in file {
        let explicit =
            matches.try_contains_id(k).unwrap_or(false) && matches.value_source(k) == Some(ValueSource::CommandLine);
        if merged.contains_key(k) && !explicit {
            merged.insert(k.clone(), v.clone());
        }
    }
    Ok(serde_json::from_value(Value::Object(merged))?)
}

fn initial_field(input: &Option<PathBuf>, amplitude: f64, grid: &GridArgs) -> Result<Field> {
    match input {
        Some(path) => Ok(io::load_field(path)?.1),
        None => Ok(Field::gaussian(grid.grid()?, amplitude)),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn save(path: &Path, field: &Field, description: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    io::save_field(path, field, description)
}

/// Outcome of a subcommand: a JSON summary and whether its checks passed.
struct Outcome {
    summary: Value,
    passed: bool,
}

fn eigenstate(a: EigenstateArgs) -> Result<Outcome> {
    let nu = a.nu.unwrap_or_else(|| eigen::family_nu(a.grid.dim, a.j, a.theta_over_pi * PI, a.sign));
    let problem = MinimizationProblem::new(nu, a.sign, a.grid.grid()?);
    let sol = eigen::solve_eigenstate(&problem, a.tol, a.max_iter)?;
    let out = experiment::resolve_output(&a.output);
    save(&out, &sol.psi, &format!("eigenstate nu={nu}"))?;
    let summary = json!({
        "nu": sol.nu,
        "mu": sol.mu,
        "delta": sol.delta,
        "residual": sol.residual,
        "gradient_norm": sol.gradient_norm,
        "iterations": sol.iterations,
        "l2": sol.psi.l2(),
        "grad_l2": grad_l2(&sol.psi),
        "field": out,
    });
    write_json(&out.with_extension("json"), &summary)?;
    Ok(Outcome { summary, passed: true })
}

fn propagate(a: PropagateArgs) -> Result<Outcome> {
    let u0 = initial_field(&a.input, a.amplitude, &a.grid)?;
    let cfg = a.equation.config(u0.grid().dim(), a.sigma);
    let opts = PropagateOptions { checkpoints: a.checkpoints.clone(), richardson: a.richardson };
    let r = propagator::propagate_with(&u0, a.t0, a.t1, &cfg, a.dt, &opts)?;
    let out = experiment::resolve_output(&a.output);
    save(&out, &r.field, &format!("{:?} solution at t={}", a.equation, a.t1))?;
    for (t, snap) in r.times.iter().zip(&r.snapshots) {
        save(&out.with_file_name(format!("checkpoint_t{t}.field")), snap, &format!("solution at t={t}"))?;
    }
    let summary = json!({
        "steps": r.steps,
        "mass_drift": r.mass_drift,
        "energy_drift": r.energy_drift,
        "blew_up": r.blew_up,
        "blowup_time": r.blowup_time,
        "richardson_error": r.richardson_error,
        "checkpoint_times": r.times,
        "field": out,
    });
    Ok(Outcome { summary, passed: !r.blew_up })
}

fn scatter_summary(s: &scattering::ScatteringResult) -> Value {
    json!({
        "method": s.method,
        "discretization_estimate": s.discretization_estimate,
        "cross_check_gap": s.cross_check_gap,
        "l2_defect": s.l2_defect,
        "h1_defect": s.h1_defect,
        "mass_drift": s.mass_drift,
    })
}

fn scatter(a: ScatterArgs) -> Result<Outcome> {
    let u = match &a.input {
        Some(_) => initial_field(&a.input, a.amplitude, &a.grid)?,
        None => fourier::inverse_fourier(&Field::gaussian(a.grid.grid()?, a.amplitude))?,
    };
    let opts = DirectOptions { horizon: a.horizon, dt: a.direct_dt, extrapolate: a.extrapolate };
    let out = experiment::resolve_output(&a.output);
    let results = match a.method.as_str() {
        "lens" => {
            let cfg = propagator::NlsConfig::critical(u.grid().dim(), a.sign, propagator::Potential::Harmonic);
            vec![scattering::scattering_lens_with(&u, &cfg, a.dt, a.richardson)?]
        }
        "direct" => vec![scattering::scattering_direct(&u, a.sign, &opts)?],
        "both" => {
            let (lens, direct) =
                scattering::cross_check(&u, a.sign, a.dt, &scattering::direct_grid(u.grid().dim()), &opts)?;
            vec![lens, direct]
        }
        other => return Err(Error::InvalidProblem(format!("unknown method {other:?}"))),
    };
    save(&out, &results[0].u_plus, "future asymptotic state")?;
    let summary = Value::Array(results.iter().map(scatter_summary).collect());
    Ok(Outcome { summary: json!({ "results": summary, "field": out }), passed: true })
}

fn rotate_check(a: ExperimentArgs) -> Result<Outcome> {
    let outcome = experiment::run_experiment(&a.config())?;
    let passed = outcome.all_passed;
    Ok(Outcome { summary: serde_json::to_value(outcome)?, passed })
}

fn perturbation(a: PerturbationArgs) -> Result<Outcome> {
    let u = match &a.input {
        Some(_) => initial_field(&a.input, 1.0, &a.grid)?,
        None => Field::from_real_fn(a.grid.grid()?, |x| {
            PI.powf(-0.25 * x.len() as f64) * (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
        }),
    };
    let report = scattering::expansion_study(&u, &a.epsilons, a.dt)?;
    let summary = serde_json::to_value(&report)?;
    write_json(&experiment::resolve_output(&a.output), &summary)?;
    Ok(Outcome { summary, passed: true })
}

fn stability(a: StabilityArgs) -> Result<Outcome> {
    let datum =
        scattering::build_rotating_datum(a.theta_over_pi * PI, a.j, a.grid.dim, a.sign, &a.grid.datum_options())?;
    let dt = a.dt.unwrap_or_else(|| experiment::default_dt(a.sign));
    let report = scattering::stability_probe(&datum.endpoint, a.sign, a.epsilon, a.trials, a.seed, dt)?;
    let summary = serde_json::to_value(&report)?;
    write_json(&experiment::resolve_output(&a.output), &summary)?;
    Ok(Outcome { summary, passed: report.blowups == 0 })
}

fn resolution_study(a: ResolutionArgs) -> Result<Outcome> {
    let cfg = a.experiment.config();
    let rows = experiment::resolution_study(&cfg, a.levels, a.linear)?;
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let csv = dir.join("resolution.csv");
    experiment::write_resolution_csv(&csv, &rows)?;
    Ok(Outcome { summary: json!({ "rows": rows, "csv": csv }), passed: true })
}

fn identity_suite(mut a: IdentityArgs) -> Result<Outcome> {
    if a.grid.dim == 1 {
        a.grid.half_width.get_or_insert(24.0);
        a.grid.points.get_or_insert(2048);
    }
    let u = initial_field(&a.input, a.amplitude, &a.grid)?;
    let shift = if u.grid().dim() == 1 { [a.shift, 0] } else { [a.shift, a.shift] };
    let report = scattering::identity_suite(&u, a.eta, shift, a.dt)?;
    let passed = report.max_defect() < a.threshold;
    let summary =
        json!({ "report": report, "max_defect": report.max_defect(), "threshold": a.threshold, "passed": passed });
    write_json(&experiment::resolve_output(&a.output), &summary)?;
    Ok(Outcome { summary, passed })
}

fn dispatch(m: &ArgMatches, config: &Option<Value>) -> Result<Outcome> {
    let (name, sub) = m.subcommand().expect("subcommand required");
    macro_rules! run {
        ($ty:ty, $f:ident) => {{
            let args = <$ty>::from_arg_matches(sub).map_err(|e| Error::InvalidProblem(e.to_string()))?;
            $f(layered(args, sub, config)?)
        }};
    }
    match name {
        "eigenstate" => run!(EigenstateArgs, eigenstate),
        "propagate" => run!(PropagateArgs, propagate),
        "scatter" => run!(ScatterArgs, scatter),
        "rotate-check" => run!(ExperimentArgs, rotate_check),
        "perturbation" => run!(PerturbationArgs, perturbation),
        "stability" => run!(StabilityArgs, stability),
        "resolution-study" => run!(ResolutionArgs, resolution_study),
        "identity-suite" => run!(IdentityArgs, identity_suite),
        _ => unreachable!(),
    }
}

fn run() -> Result<Outcome> {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    let config = match matches.get_one::<PathBuf>("config") {
        Some(path) => Some(serde_json::from_str::<Value>(&fs::read_to_string(path)?)?),
        None => None,
    };
    dispatch(&matches, &config)
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.summary).unwrap_or_default();
            let _ = writeln!(std::io::stdout(), "{text}");
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
