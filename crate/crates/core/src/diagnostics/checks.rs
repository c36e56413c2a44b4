use super::fit::{fit_power_law, SlopeFit, WeightedFamily};
use super::TimeSeries;
use crate::error::{invalid, Error, Result};
use crate::model::SimState;
use crate::spectral::{lp_norm, lp_norm_vector, RealField, SpectralOps};

/// Quantities left unchanged by the parabolic rescaling
/// `n_k(x,t) = k²n(kx,k²t)`, `c_k = c(kx,k²t)`, `ω_k = k²ω(kx,k²t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleInvariants {
    pub n_l1: f64,
    pub c_linf: f64,
    pub omega_l1: f64,
    pub circulation: f64,
}

impl ScaleInvariants {
    pub fn of(state: &SimState) -> Result<Self> {
        Ok(ScaleInvariants {
            n_l1: lp_norm(&state.n, 1.0)?,
            c_linf: lp_norm(&state.c, f64::INFINITY)?,
            omega_l1: lp_norm(&state.omega, 1.0)?,
            circulation: state.omega.integral(),
        })
    }

    fn rows(&self) -> [(&'static str, f64); 4] {
        [
            ("n_L1", self.n_l1),
            ("c_Linf", self.c_linf),
            ("omega_L1", self.omega_l1),
            ("circulation", self.circulation),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantRow {
    pub name: &'static str,
    pub base: f64,
    pub rescaled: f64,
    /// `|rescaled - base| / |base|`, or the absolute gap when `base = 0`.
    pub deviation: f64,
}

/// One matched pair of checkpoints: base time `s`, rescaled time `s/k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub label: String,
    pub s: f64,
    pub base: f64,
    pub rescaled: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaleReport {
    pub k: u32,
    pub invariants: Vec<InvariantRow>,
    pub curve: Vec<CurvePoint>,
}

impl RescaleReport {
    pub fn max_invariant_deviation(&self) -> f64 {
        self.invariants
            .iter()
            .map(|r| r.deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_curve_deviation(&self) -> f64 {
        self.curve.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    pub fn passes(&self, invariant_tol: f64, curve_tol: f64) -> bool {
        self.max_invariant_deviation() <= invariant_tol && self.max_curve_deviation() <= curve_tol
    }
}

fn deviation(base: f64, other: f64) -> f64 {
    let gap = (other - base).abs();
    if base == 0.0 {
        gap
    } else {
        gap / base.abs()
    }
}

/// Compares a base run with its `k`-rescaled counterpart: the scale
/// invariants of the two initial states, and the weighted curves
/// `t^{1-1/p}‖n_k(t)‖_p` at `t = s/k²` against `s^{1-1/p}‖n(s)‖_p`.
pub fn rescale_check(
    k: u32,
    base_initial: &ScaleInvariants,
    rescaled_initial: &ScaleInvariants,
    base: &TimeSeries,
    rescaled: &TimeSeries,
    p_list: &[f64],
) -> Result<RescaleReport> {
    if k == 0 {
        return Err(invalid("rescale factor must be >= 1"));
    }
    let k2 = f64::from(k * k);
    let invariants = base_initial
        .rows()
        .iter()
        .zip(rescaled_initial.rows())
        .map(|((name, b), (_, r))| InvariantRow {
            name,
            base: *b,
            rescaled: r,
            deviation: deviation(*b, r),
        })
        .collect();

    let mut curve = Vec::new();
    for &p in p_list {
        let family = WeightedFamily::Density(p);
        let a = family.weight_exponent();
        let label = family.label();
        let b_col = base.column(&label)?;
        let r_col = rescaled.column(&label)?;
        for &(s, bv) in &b_col {
            if s <= 0.0 {
                continue;
            }
            let tol = 1e-9 * s.max(1.0);
            let Some(&(t, rv)) = r_col.iter().find(|(t, _)| (t * k2 - s).abs() <= tol) else {
                continue;
            };
            let bw = s.powf(a) * bv;
            let rw = t.powf(a) * rv;
            curve.push(CurvePoint {
                label: label.clone(),
                s,
                base: bw,
                rescaled: rw,
                deviation: deviation(bw, rw),
            });
        }
    }
    if curve.is_empty() && !p_list.is_empty() {
        return Err(invalid(
            "no matching checkpoints between base and rescaled runs",
        ));
    }
    Ok(RescaleReport {
        k,
        invariants,
        curve,
    })
}

/// Size of `(K∗g)·∇f` relative to `sup|K∗g| · sup|∇f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIdentity {
    pub sup: f64,
    pub scale: f64,
}

impl RadialIdentity {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.sup
        } else {
            self.sup / self.scale
        }
    }
}

/// Largest deviation from the square symmetries about the box center.
fn asymmetry(f: &RealField) -> f64 {
    let n = f.grid().n_points();
    let mirror = |i: usize| (n - i) % n;
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            let v = f.at(i, j);
            worst = worst
                .max((v - f.at(mirror(i), j)).abs())
                .max((v - f.at(i, mirror(j))).abs())
                .max((v - f.at(j, i)).abs());
        }
    }
    worst
}

fn check_radial(name: &str, f: &RealField) -> Result<()> {
    let n = f.grid().n_points();
    let shifted = RealField::from_values(
        *f.grid(),
        (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                f.at((i + n / 2) % n, (j + n / 2) % n)
            })
            .collect(),
    )?;
    let tol = 1e-12 * f.max_abs();
    let defect = asymmetry(&shifted);
    if defect > tol {
        return Err(invalid(format!(
            "{name} is not radial about the box center (asymmetry {defect:e})"
        )));
    }
    Ok(())
}

/// Evaluates `sup |(K∗g)·∇f|` for profiles radial about the box center,
/// where the velocity is azimuthal and the gradient radial.
pub fn radial_identity_check(
    ops: &SpectralOps,
    g: &RealField,
    f: &RealField,
) -> Result<RadialIdentity> {
    check_radial("g", g)?;
    check_radial("f", f)?;
    let u = ops.biot_savart(g)?;
    let grad = ops.gradient(f)?;
    let sup = u.dot(&grad).max_abs();
    Ok(RadialIdentity {
        sup,
        scale: u.max_magnitude() * grad.max_magnitude(),
    })
}

/// Ratios `‖∇^α e^{tΔ}u₀‖_q / (t^{-(1/r-1/q)-|α|/2} ‖u₀‖_r)` and their log-log slope.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingProbe {
    pub points: Vec<(f64, f64)>,
    pub fit: SlopeFit,
}

/// Measures the constant in the heat smoothing estimate at each time in `times`.
/// `order` is the derivative order `|α|` (0 or 1).
pub fn smoothing_constant_probe(
    ops: &SpectralOps,
    u0: &RealField,
    q: f64,
    r: f64,
    order: u8,
    times: &[f64],
) -> Result<SmoothingProbe> {
    if order > 1 {
        return Err(invalid(format!(
            "derivative order {order} not supported (0 or 1)"
        )));
    }
    let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
    let exponent = -(inv(r) - inv(q)) - 0.5 * f64::from(order);
    let base = lp_norm(u0, r)?;
    if base == 0.0 {
        return Err(invalid("smoothing probe needs a nonzero input"));
    }
    let t_sat = ops.grid().saturation_time();
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0) {
            return Err(invalid(format!("probe time {t} must be positive")));
        }
        if t > t_sat {
            return Err(Error::Saturation(format!(
                "probe time {t} exceeds saturation time {t_sat}"
            )));
        }
        let evolved = ops.heat_propagator(u0, t)?;
        let top = if order == 0 {
            lp_norm(&evolved, q)?
        } else {
            lp_norm_vector(&ops.gradient(&evolved)?, q)?
        };
        points.push((t, top / (t.powf(exponent) * base)));
    }
    let fit = fit_power_law(&points, 2)?;
    Ok(SmoothingProbe { points, fit })
}
