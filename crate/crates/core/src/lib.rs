//! Pseudo-spectral solver for the two-dimensional chemotaxis / Navier–Stokes
//! system in vorticity form, together with the diagnostics that measure its
//! temporal decay and its convergence toward heat-kernel profiles.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod kernel;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
