use super::{RealField, VectorField};
use crate::error::{invalid, Result};

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!(
            "norm exponent must be >= 1 or infinite (got {p})"
        )));
    }
    Ok(())
}

/// Discrete `L^p` norm of a sequence of magnitudes sampled with cell area
/// `area`. Summation runs in iteration order, so results are reproducible.
pub fn lp_norm_of(samples: impl Iterator<Item = f64> + Clone, area: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let peak = samples.clone().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || peak == 0.0 {
        return Ok(peak);
    }
    if p == 1.0 {
        return Ok(samples.map(f64::abs).sum::<f64>() * area);
    }
    // scale by the peak so large p neither overflows nor underflows
    let sum: f64 = samples.map(|v| (v.abs() / peak).powf(p)).sum();
    Ok(peak * (sum * area).powf(1.0 / p))
}

/// `(Σ |f|^p h²)^{1/p}`, or `max |f|` for `p = ∞`.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64> {
    lp_norm_of(f.values().iter().copied(), f.grid().cell_area(), p)
}

/// `L^p` norm of the pointwise Euclidean length of `v`.
pub fn lp_norm_vector(v: &VectorField, p: f64) -> Result<f64> {
    let xs = v.x1.values();
    let ys = v.x2.values();
    lp_norm_of(
        xs.iter().zip(ys).map(|(a, b)| a.hypot(*b)),
        v.grid().cell_area(),
        p,
    )
}
