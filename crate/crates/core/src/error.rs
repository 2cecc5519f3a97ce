use thiserror::Error;

use crate::eigen::EigenstateSolution;
use crate::spectral::Grid;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite samples")]
    InvalidField,

    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: Grid, right: Grid },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("singular time {0}")]
    SingularTime(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("Lagrange multiplier {mu} has the wrong sign for this branch")]
    WrongBranch { mu: f64 },

    #[error("no convergence after {} iterations (projected gradient {:.3e})", best.iterations, best.gradient_norm)]
    NonConvergence { best: Box<EigenstateSolution> },

    #[error("blow-up detected at t = {0}")]
    BlowUpDetected(f64),

    #[error("harmonic solution blew up at s = {0} inside the lens interval")]
    BlowUpOnLensInterval(f64),

    #[error("unsupported exponent sigma = {sigma}: requires sigma = 2/d = {required}")]
    UnsupportedExponent { sigma: f64, required: f64 },

    #[error("field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
