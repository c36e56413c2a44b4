use super::{norm_label, TimeSeries};
use crate::error::{invalid, Result};

/// Least-squares line through `(ln t, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits `value ≈ e^intercept · t^slope`. Every `t` and value must be positive.
pub fn fit_power_law(points: &[(f64, f64)], min_points: usize) -> Result<SlopeFit> {
    let need = min_points.max(2);
    if points.len() < need {
        return Err(invalid(format!(
            "power-law fit needs at least {need} points (got {})",
            points.len()
        )));
    }
    if let Some(&(t, v)) = points
        .iter()
        .find(|(t, v)| !(*t > 0.0 && *v > 0.0 && v.is_finite()))
    {
        return Err(invalid(format!(
            "power-law fit needs positive data (t = {t}, value = {v})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("power-law fit needs at least two distinct times"));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        points: logs.len(),
    })
}

/// Minimum number of checkpoints inside a decay-fit window.
pub const MIN_FIT_POINTS: usize = 8;

/// Power-law fit of one series column over checkpoints with `t ∈ [t1, t2]`.
pub fn decay_slope(series: &TimeSeries, label: &str, window: (f64, f64)) -> Result<SlopeFit> {
    let (t1, t2) = window;
    if !(t1 > 0.0 && t2 > t1) {
        return Err(invalid(format!(
            "fit window [{t1}, {t2}] must satisfy 0 < t1 < t2"
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .column(label)?
        .into_iter()
        .filter(|(t, _)| *t >= t1 && *t <= t2)
        .collect();
    fit_power_law(&pts, MIN_FIT_POINTS)
}

/// Time-weighted norm families `sup_t t^a ‖·‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightedFamily {
    /// `t^{1-1/p} ‖n‖_p`
    Density(f64),
    /// `t^{1/2-1/q} ‖∇c‖_q`
    ChemGradient(f64),
    /// `t^{1-1/r} ‖ω‖_r`
    Vorticity(f64),
    /// `t^{3/2} ‖∇n‖_∞`
    DensityGradient,
    /// `t ‖∇²c‖_∞`
    ChemHessian,
    /// `t^{3/2-1/r} ‖∇ω‖_r`
    VorticityGradient(f64),
}

impl WeightedFamily {
    /// Series column holding the unweighted norm.
    pub fn label(&self) -> String {
        match *self {
            WeightedFamily::Density(p) => norm_label("n", p),
            WeightedFamily::ChemGradient(q) => norm_label("grad_c", q),
            WeightedFamily::Vorticity(r) => norm_label("omega", r),
            WeightedFamily::DensityGradient => "grad_n_Linf".into(),
            WeightedFamily::ChemHessian => "grad2_c_Linf".into(),
            WeightedFamily::VorticityGradient(r) => norm_label("grad_omega", r),
        }
    }

    /// Power `a` of the time weight; the expected decay exponent is `-a`.
    pub fn weight_exponent(&self) -> f64 {
        let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
        match *self {
            WeightedFamily::Density(p) => 1.0 - inv(p),
            WeightedFamily::ChemGradient(q) => 0.5 - inv(q),
            WeightedFamily::Vorticity(r) => 1.0 - inv(r),
            WeightedFamily::DensityGradient => 1.5,
            WeightedFamily::ChemHessian => 1.0,
            WeightedFamily::VorticityGradient(r) => 1.5 - inv(r),
        }
    }
}

/// Discrete supremum of `t^a ‖·‖` over checkpoints with `t ≥ t_min`.
pub fn weighted_norm(series: &TimeSeries, family: WeightedFamily, t_min: f64) -> Result<f64> {
    let a = family.weight_exponent();
    let window: Vec<f64> = series
        .column(&family.label())?
        .into_iter()
        .filter(|(t, _)| *t >= t_min)
        .map(|(t, v)| if a == 0.0 { v } else { t.powf(a) * v })
        .collect();
    if window.is_empty() {
        return Err(invalid(format!(
            "no checkpoints at or after t_min = {t_min}"
        )));
    }
    Ok(window.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
