//! Decay-rate fits, profile trends, weighted norms and the rescaling comparison.

use crate::diagnostics::{
    decay_slope, rescale_check, weighted_norm, RescaleReport, ScaleInvariants, TimeSeries,
    WeightedFamily,
};
use crate::error::{invalid, Result};

use super::config::RunConfig;
use super::run::simulate;

/// One fitted decay exponent against its target band.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub quantity: String,
    pub fitted_slope: f64,
    pub target_slope: f64,
    pub band: f64,
    pub pass: bool,
}

/// `(family, band)` for every asserted decay rate under this config.
pub fn decay_targets(cfg: &RunConfig) -> Vec<(WeightedFamily, f64)> {
    let mut out = vec![
        (WeightedFamily::Density(f64::INFINITY), 0.15),
        (WeightedFamily::ChemGradient(f64::INFINITY), 0.15),
        (WeightedFamily::DensityGradient, 0.2),
        (WeightedFamily::ChemHessian, 0.2),
    ];
    for &r in cfg.r_list.iter().filter(|&&r| r > 1.0) {
        out.push((WeightedFamily::Vorticity(r), 0.15));
    }
    for &r in cfg.r_list.iter().filter(|&&r| r < 2.0) {
        out.push((WeightedFamily::VorticityGradient(r), 0.2));
    }
    out
}

/// Fits every decay target over the configured window. A quantity that
/// cannot be fitted (for instance identically zero) yields a failing row
/// with a NaN slope.
pub fn decay_rows(cfg: &RunConfig, series: &TimeSeries) -> Vec<DecayRow> {
    decay_targets(cfg)
        .into_iter()
        .map(|(family, band)| {
            let target = -family.weight_exponent();
            let fitted = decay_slope(series, &family.label(), (cfg.fit_start, cfg.fit_end))
                .map(|f| f.slope)
                .unwrap_or(f64::NAN);
            DecayRow {
                quantity: family.label(),
                fitted_slope: fitted,
                target_slope: target,
                band,
                pass: (fitted - target).abs() <= band,
            }
        })
        .collect()
}

pub fn decay_report_csv(rows: &[DecayRow]) -> String {
    let mut out = String::from("quantity,fitted_slope,target_slope,band,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{}\n",
            r.quantity,
            r.fitted_slope,
            r.target_slope,
            r.band,
            if r.pass { "pass" } else { "fail" }
        ));
    }
    out
}

/// Profile columns sampled at fixed times, required to strictly decrease.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub quantity: String,
    pub times: Vec<f64>,
    /// `None` where the series has no checkpoint at that time.
    pub values: Vec<Option<f64>>,
    pub pass: bool,
}

pub const TREND_TIMES: [f64; 3] = [10.0, 20.0, 40.0];
pub const TREND_COLUMNS: [&str; 3] = ["prof_n", "prof_gradc", "prof_omega"];

pub fn profile_trends(series: &TimeSeries, times: &[f64]) -> Vec<TrendRow> {
    TREND_COLUMNS
        .iter()
        .map(|&label| {
            let values: Vec<Option<f64>> = times
                .iter()
                .map(|&t| {
                    series
                        .records()
                        .iter()
                        .find(|r| (r.t - t).abs() <= 1e-9 * t.max(1.0))
                        .and_then(|r| r.get(label))
                })
                .collect();
            let pass = values.iter().all(Option::is_some)
                && values
                    .windows(2)
                    .all(|w| matches!(w, [Some(a), Some(b)] if b < a));
            TrendRow {
                quantity: label.to_string(),
                times: times.to_vec(),
                values,
                pass,
            }
        })
        .collect()
}

pub fn profile_trend_csv(rows: &[TrendRow]) -> String {
    let mut out = String::from("quantity");
    if let Some(first) = rows.first() {
        for t in &first.times {
            out.push_str(&format!(",t={t}"));
        }
    }
    out.push_str(",pass\n");
    for r in rows {
        out.push_str(&r.quantity);
        for v in &r.values {
            match v {
                Some(x) => out.push_str(&format!(",{x:.16e}")),
                None => out.push_str(",missing"),
            }
        }
        out.push_str(if r.pass { ",pass\n" } else { ",fail\n" });
    }
    out
}

/// Weighted suprema `sup_{t ≥ t_min} t^a ‖·‖` for every recorded family.
pub fn weighted_norms(cfg: &RunConfig, series: &TimeSeries) -> Vec<(String, f64)> {
    let mut families = vec![
        WeightedFamily::Density(1.0),
        WeightedFamily::Density(f64::INFINITY),
        WeightedFamily::ChemGradient(f64::INFINITY),
        WeightedFamily::DensityGradient,
        WeightedFamily::ChemHessian,
    ];
    families.extend(cfg.p_list.iter().map(|&p| WeightedFamily::Density(p)));
    families.extend(cfg.q_list.iter().map(|&q| WeightedFamily::ChemGradient(q)));
    families.extend(cfg.r_list.iter().map(|&r| WeightedFamily::Vorticity(r)));
    families.extend(
        cfg.r_list
            .iter()
            .filter(|&&r| r < 2.0)
            .map(|&r| WeightedFamily::VorticityGradient(r)),
    );
    families
        .into_iter()
        .filter_map(|f| {
            weighted_norm(series, f, cfg.t_min)
                .ok()
                .map(|v| (format!("t^{}·{}", f.weight_exponent(), f.label()), v))
        })
        .collect()
}

/// Tolerances of the rescaling comparison.
pub const RESCALE_INVARIANT_TOL: f64 = 1e-8;
pub const RESCALE_CURVE_TOL: f64 = 0.02;

/// Runs `cfg` and its `k`-rescaled copy and compares them.
pub fn run_rescale(cfg: &RunConfig, k: u32) -> Result<RescaleReport> {
    if k == 0 {
        return Err(invalid("rescale factor k must be >= 1"));
    }
    let scaled = cfg.rescaled(k);
    scaled.check()?;
    let base = simulate(cfg, None)?;
    base.result
        .as_ref()
        .map_err(|e| invalid(format!("base run failed: {e}")))?;
    let other = simulate(&scaled, None)?;
    other
        .result
        .as_ref()
        .map_err(|e| invalid(format!("rescaled run failed: {e}")))?;
    let mut p_list = cfg.p_list.clone();
    if !p_list.contains(&1.0) {
        p_list.insert(0, 1.0);
    }
    if !p_list.iter().any(|p| p.is_infinite()) {
        p_list.push(f64::INFINITY);
    }
    rescale_check(
        k,
        &ScaleInvariants::of(&base.initial)?,
        &ScaleInvariants::of(&other.initial)?,
        &base.series,
        &other.series,
        &p_list,
    )
}

pub fn rescale_report_csv(report: &RescaleReport) -> String {
    let mut out = String::from("kind,quantity,s,base,rescaled,deviation\n");
    for r in &report.invariants {
        out.push_str(&format!(
            "invariant,{},0,{:.16e},{:.16e},{:.16e}\n",
            r.name, r.base, r.rescaled, r.deviation
        ));
    }
    for c in &report.curve {
        out.push_str(&format!(
            "curve,{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            c.label, c.s, c.base, c.rescaled, c.deviation
        ));
    }
    out
}
