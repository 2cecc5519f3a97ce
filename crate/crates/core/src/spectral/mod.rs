//! Grids, complex fields, the continuum-normalized Fourier transform, norms
//! and the field file format.

mod field;
pub mod fourier;
mod grid;
pub mod io;
mod norms;

pub use field::Field;
pub use fourier::{fourier, inverse_fourier, FftWorkspace};
pub use grid::Grid;
pub use norms::{grad_l2, norms, xf_l2, SigmaNorms};
