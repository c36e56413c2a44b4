//! Closed-form heat kernels on the periodic box, via a truncated image sum.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::spectral::{GridSpec, RealField};

/// Image offsets per axis: the minimum image plus one neighbour on each side.
const IMAGES: [f64; 3] = [-1.0, 0.0, 1.0];

fn image_factors(grid: &GridSpec, center: f64, four_t: f64) -> Vec<f64> {
    let l = grid.box_length();
    (0..grid.n_points())
        .map(|i| {
            let d = grid.periodic_offset(grid.coord(i), center);
            IMAGES
                .iter()
                .map(|a| {
                    let s = d + a * l;
                    (-s * s / four_t).exp()
                })
                .sum()
        })
        .collect()
}

/// Periodized 2D heat kernel `Γ(x - c, t) = (4πt)⁻¹ exp(-|x - c|²/4t)`.
pub fn periodic_heat_kernel(grid: &GridSpec, center: [f64; 2], t: f64) -> Result<RealField> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("heat kernel needs t > 0 (got {t})")));
    }
    let four_t = 4.0 * t;
    let fx = image_factors(grid, center[0], four_t);
    let fy = image_factors(grid, center[1], four_t);
    let norm = 1.0 / (PI * four_t);
    let n = grid.n_points();
    let mut values = Vec::with_capacity(grid.len());
    for gy in &fy {
        for gx in fx.iter().take(n) {
            values.push(norm * gx * gy);
        }
    }
    RealField::from_values(*grid, values)
}

/// Periodized Gaussian of standard deviation `sigma` carrying total `mass`;
/// identical to `mass · Γ(·, σ²/2)`.
pub fn periodic_gaussian(
    grid: &GridSpec,
    center: [f64; 2],
    sigma: f64,
    mass: f64,
) -> Result<RealField> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("Gaussian width must be > 0 (got {sigma})")));
    }
    Ok(periodic_heat_kernel(grid, center, 0.5 * sigma * sigma)?.scaled(mass))
}

/// `‖Γ(t)‖_{L^p(ℝ²)} = (4πt)^{1/p-1} p^{-1/p}`.
pub fn heat_kernel_lp_norm(t: f64, p: f64) -> f64 {
    if p.is_infinite() {
        1.0 / (4.0 * PI * t)
    } else {
        (4.0 * PI * t).powf(1.0 / p - 1.0) * p.powf(-1.0 / p)
    }
}
