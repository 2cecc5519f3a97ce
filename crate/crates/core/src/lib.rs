//! Rotating points of the scattering operator for the mass-critical
//! nonlinear Schrödinger equation
//!
//! ```text
//! i u_t + Δu/2 = ± |u|^{4/d} u,   d = 1, 2,
//! ```
//!
//! computed in finite time through the lens transform. The scattering
//! operator `S` is evaluated by propagating the harmonic-oscillator equation
//! across `[-pi/2, pi/2]`; rotating points come from even solutions of the
//! nonlinear eigenvalue problem `H phi ± |phi|^{4/d} phi = nu phi`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod experiment;
pub mod free;
pub mod harmonic;
pub mod lens;
pub mod propagator;
pub mod scattering;
pub mod spectral;

pub use error::{Error, Result};
