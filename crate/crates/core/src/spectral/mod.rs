//! Fourier machinery on the periodic square: transforms, derivative and
//! Biot–Savart multipliers, the heat propagator, dealiasing and grid norms.

mod field;
mod grid;
mod norms;
mod ops;

pub use field::{RealField, SpectralCoeffs, VectorField};
pub use grid::GridSpec;
pub use norms::{lp_norm, lp_norm_of, lp_norm_vector};
pub use ops::SpectralOps;
