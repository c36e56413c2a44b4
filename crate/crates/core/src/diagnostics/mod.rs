//! Measurements taken at checkpoints: conserved integrals, grid norms of the
//! solution and its derivatives, parabolic-ball profile distances, and the
//! analyses built on top of them (power-law fits, weighted suprema, the
//! rescaling comparison, the radial Biot–Savart identity and the heat
//! smoothing probe).

mod checks;
mod fit;

use crate::error::{invalid, Error, Result};
use crate::kernel::periodic_heat_kernel;
use crate::model::SimState;
use crate::spectral::{
    lp_norm, lp_norm_of, lp_norm_vector, GridSpec, RealField, SpectralOps, VectorField,
};

pub use checks::{
    radial_identity_check, rescale_check, smoothing_constant_probe, CurvePoint, InvariantRow,
    RadialIdentity, RescaleReport, ScaleInvariants, SmoothingProbe,
};
pub use fit::{decay_slope, fit_power_law, weighted_norm, SlopeFit, WeightedFamily};

/// Columns present in every record, in CSV order (after `t`).
pub const FIXED_COLUMNS: [&str; 9] = [
    "mass",
    "circulation",
    "min_n",
    "max_c",
    "n_L1",
    "n_Linf",
    "grad_n_Linf",
    "grad_c_Linf",
    "grad2_c_Linf",
];

/// Profile columns, always last.
pub const PROFILE_COLUMNS: [&str; 3] = ["prof_n", "prof_omega", "prof_gradc"];

/// Column label for an exponent: `2` → `L2`, `1.5` → `L1.5`, `∞` → `Linf`.
pub fn norm_label(quantity: &str, p: f64) -> String {
    if p.is_infinite() {
        format!("{quantity}_Linf")
    } else {
        format!("{quantity}_L{p}")
    }
}

/// Which exponents are measured, and where the parabolic ball sits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagConfig {
    /// Exponents for `‖n‖_p`.
    pub p_list: Vec<f64>,
    /// Exponents for `‖∇c‖_q`.
    pub q_list: Vec<f64>,
    /// Exponents for `‖ω‖_r`; those below 2 also give `‖∇ω‖_r`.
    pub r_list: Vec<f64>,
    /// Ball parameter `R` in `|x - center| < R√t`.
    pub ball_radius: f64,
    /// Exponent of the vorticity profile norm.
    pub profile_r: f64,
    /// Center of the initial bumps, used as the ball center.
    pub center: [f64; 2],
    pub mass: f64,
    pub circulation: f64,
}

impl DiagConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("p", &self.p_list),
            ("q", &self.q_list),
            ("r", &self.r_list),
        ] {
            for &e in list.iter() {
                if !(e.is_finite() && e >= 1.0) {
                    return Err(invalid(format!(
                        "{name} exponent {e} must be finite and >= 1"
                    )));
                }
            }
        }
        if !(self.ball_radius > 0.0 && self.ball_radius.is_finite()) {
            return Err(invalid(format!(
                "ball radius {} must be positive",
                self.ball_radius
            )));
        }
        if !(self.profile_r.is_finite() && self.profile_r >= 1.0) {
            return Err(invalid(format!(
                "profile exponent {} must be finite and >= 1",
                self.profile_r
            )));
        }
        if !(self.mass.is_finite() && self.circulation.is_finite()) {
            return Err(invalid("mass and circulation must be finite"));
        }
        Ok(())
    }

    /// Configured norm columns in CSV order, without duplicates of the fixed set.
    pub fn configured_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        let mut add = |label: String| {
            if !FIXED_COLUMNS.contains(&label.as_str()) && !cols.contains(&label) {
                cols.push(label);
            }
        };
        for &p in &self.p_list {
            add(norm_label("n", p));
        }
        add(norm_label("grad_n", 2.0));
        for &q in &self.q_list {
            add(norm_label("grad_c", q));
        }
        for &r in &self.r_list {
            add(norm_label("omega", r));
        }
        for &r in self.r_list.iter().filter(|&&r| r < 2.0) {
            add(norm_label("grad_omega", r));
        }
        cols
    }

    /// Every column after `t`, in CSV order.
    pub fn columns(&self) -> Vec<String> {
        FIXED_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .chain(self.configured_columns())
            .chain(PROFILE_COLUMNS.iter().map(|s| s.to_string()))
            .collect()
    }

    /// Radius of the ball at time `t`.
    pub fn ball_extent(&self, t: f64) -> f64 {
        self.ball_radius * t.max(0.0).sqrt()
    }

    /// Latest time at which the ball still fits inside `L/4`.
    pub fn last_ball_time(&self, grid: &GridSpec) -> f64 {
        let r = grid.box_length() / (4.0 * self.ball_radius);
        r * r
    }
}

/// Values measured at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRecord {
    pub t: f64,
    /// `(label, value)` in CSV column order.
    pub entries: Vec<(String, f64)>,
}

impl CheckpointRecord {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| k == label)
            .map(|(_, v)| *v)
    }

    pub fn mass(&self) -> f64 {
        self.get("mass").unwrap_or(f64::NAN)
    }

    pub fn circulation(&self) -> f64 {
        self.get("circulation").unwrap_or(f64::NAN)
    }
}

/// Ordered checkpoint records plus free-form run metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub metadata: Vec<(String, String)>,
    records: Vec<CheckpointRecord>,
}

impl TimeSeries {
    pub fn new(metadata: Vec<(String, String)>) -> Self {
        TimeSeries {
            metadata,
            records: Vec::new(),
        }
    }

    /// Appends a record; times must increase strictly and values be finite.
    pub fn push(&mut self, record: CheckpointRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(record.t > last.t) {
                return Err(invalid(format!(
                    "checkpoint time {} does not follow {}",
                    record.t, last.t
                )));
            }
        }
        if let Some((k, v)) = record.entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                term: format!("diagnostic {k} = {v}"),
                t: record.t,
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[CheckpointRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `(t, value)` for every record carrying `label`.
    pub fn column(&self, label: &str) -> Result<Vec<(f64, f64)>> {
        self.records
            .iter()
            .map(|r| {
                r.get(label)
                    .map(|v| (r.t, v))
                    .ok_or_else(|| invalid(format!("series has no column `{label}`")))
            })
            .collect()
    }
}

/// Target of a parabolic-ball profile comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileTarget {
    /// `t ‖n - mΓ(t)‖_{L^∞(B)}`.
    Density { mass: f64 },
    /// `t^{1-1/r} ‖ω - γΓ(t)‖_{L^r(B)}`.
    Vorticity { circulation: f64, r: f64 },
    /// `t^{1/2} ‖∇c‖_{L^∞(B)}`.
    ChemGradient,
}

/// Grid indices strictly inside `|x - center| < radius`, measured periodically.
pub fn ball_indices(grid: &GridSpec, center: [f64; 2], radius: f64) -> Result<Vec<usize>> {
    if radius > grid.box_length() / 4.0 {
        return Err(Error::Saturation(format!(
            "ball radius {radius} exceeds L/4 = {}",
            grid.box_length() / 4.0
        )));
    }
    let n = grid.n_points();
    let r2 = radius * radius;
    let dx: Vec<f64> = (0..n)
        .map(|i| grid.periodic_offset(grid.coord(i), center[0]))
        .collect();
    let dy: Vec<f64> = (0..n)
        .map(|j| grid.periodic_offset(grid.coord(j), center[1]))
        .collect();
    let mut out = Vec::new();
    for (j, y) in dy.iter().enumerate() {
        for (i, x) in dx.iter().enumerate() {
            if x * x + y * y < r2 {
                out.push(j * n + i);
            }
        }
    }
    Ok(out)
}

fn ball_norm(values: &[f64], ball: &[usize], area: f64, p: f64) -> Result<f64> {
    lp_norm_of(ball.iter().map(|&k| values[k]), area, p)
}

/// Computes checkpoint records for states on one grid.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    ops: SpectralOps,
    config: DiagConfig,
}

/// Derivatives needed by the profile columns, so they are computed only once.
struct Derived {
    grad_n: VectorField,
    grad_c: VectorField,
    hess_c: [RealField; 3],
    grad_omega: VectorField,
}

impl Diagnostics {
    pub fn new(grid: GridSpec, config: DiagConfig) -> Result<Self> {
        config.validate()?;
        Ok(Diagnostics {
            ops: SpectralOps::new(grid),
            config,
        })
    }

    pub fn config(&self) -> &DiagConfig {
        &self.config
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    fn derive(&self, s: &SimState) -> Result<Derived> {
        Ok(Derived {
            grad_n: self.ops.gradient(&s.n)?,
            grad_c: self.ops.gradient(&s.c)?,
            hess_c: self.ops.hessian(&s.c)?,
            grad_omega: self.ops.gradient(&s.omega)?,
        })
    }

    /// Weighted distance of one field to its heat-kernel profile over the
    /// ball `|x - center| < R√t`. An empty ball (`t = 0`) gives 0.
    pub fn profile_distance(&self, state: &SimState, target: ProfileTarget) -> Result<f64> {
        let grad_c = match target {
            ProfileTarget::ChemGradient => Some(self.ops.gradient(&state.c)?),
            _ => None,
        };
        self.profile_with(state, target, grad_c.as_ref())
    }

    fn profile_with(
        &self,
        state: &SimState,
        target: ProfileTarget,
        grad_c: Option<&VectorField>,
    ) -> Result<f64> {
        let t = state.t;
        let grid = *state.grid();
        if t <= 0.0 {
            return Ok(0.0);
        }
        let ball = ball_indices(&grid, self.config.center, self.config.ball_extent(t))?;
        if ball.is_empty() {
            return Ok(0.0);
        }
        let area = grid.cell_area();
        match target {
            ProfileTarget::Density { mass } => {
                let gamma = periodic_heat_kernel(&grid, self.config.center, t)?;
                let diff = state.n.zip_map(&gamma, |a, g| a - mass * g);
                Ok(t * ball_norm(diff.values(), &ball, area, f64::INFINITY)?)
            }
            ProfileTarget::Vorticity { circulation, r } => {
                let gamma = periodic_heat_kernel(&grid, self.config.center, t)?;
                let diff = state.omega.zip_map(&gamma, |a, g| a - circulation * g);
                Ok(t.powf(1.0 - 1.0 / r) * ball_norm(diff.values(), &ball, area, r)?)
            }
            ProfileTarget::ChemGradient => {
                let owned;
                let gc = match grad_c {
                    Some(g) => g,
                    None => {
                        owned = self.ops.gradient(&state.c)?;
                        &owned
                    }
                };
                let mag = gc.magnitude();
                Ok(t.sqrt() * ball_norm(mag.values(), &ball, area, f64::INFINITY)?)
            }
        }
    }

    /// Full record for one state, columns in [`DiagConfig::columns`] order.
    pub fn measure(&self, state: &SimState) -> Result<CheckpointRecord> {
        let d = self.derive(state)?;
        let cfg = &self.config;
        let hess_mag = {
            let [xx, xy, yy] = &d.hess_c;
            let v = xx
                .values()
                .iter()
                .zip(xy.values())
                .zip(yy.values())
                .map(|((a, b), c)| (a * a + 2.0 * b * b + c * c).sqrt())
                .collect();
            RealField::from_values(*state.grid(), v)?
        };

        let mut entries: Vec<(String, f64)> = vec![
            ("mass".into(), state.n.integral()),
            ("circulation".into(), state.omega.integral()),
            ("min_n".into(), state.n.min()),
            ("max_c".into(), state.c.max()),
            ("n_L1".into(), lp_norm(&state.n, 1.0)?),
            ("n_Linf".into(), lp_norm(&state.n, f64::INFINITY)?),
            (
                "grad_n_Linf".into(),
                lp_norm_vector(&d.grad_n, f64::INFINITY)?,
            ),
            (
                "grad_c_Linf".into(),
                lp_norm_vector(&d.grad_c, f64::INFINITY)?,
            ),
            ("grad2_c_Linf".into(), hess_mag.max_abs()),
        ];
        for label in cfg.configured_columns() {
            let (quantity, exponent) = label
                .rsplit_once("_L")
                .ok_or_else(|| invalid(format!("malformed column {label}")))?;
            let p: f64 = exponent
                .parse()
                .map_err(|_| invalid(format!("malformed column {label}")))?;
            let value = match quantity {
                "n" => lp_norm(&state.n, p)?,
                "grad_n" => lp_norm_vector(&d.grad_n, p)?,
                "grad_c" => lp_norm_vector(&d.grad_c, p)?,
                "omega" => lp_norm(&state.omega, p)?,
                "grad_omega" => lp_norm_vector(&d.grad_omega, p)?,
                other => return Err(invalid(format!("unknown quantity {other}"))),
            };
            entries.push((label, value));
        }
        let prof_n = self.profile_with(state, ProfileTarget::Density { mass: cfg.mass }, None)?;
        let prof_omega = self.profile_with(
            state,
            ProfileTarget::Vorticity {
                circulation: cfg.circulation,
                r: cfg.profile_r,
            },
            None,
        )?;
        let prof_gradc = self.profile_with(state, ProfileTarget::ChemGradient, Some(&d.grad_c))?;
        entries.push(("prof_n".into(), prof_n));
        entries.push(("prof_omega".into(), prof_omega));
        entries.push(("prof_gradc".into(), prof_gradc));
        Ok(CheckpointRecord {
            t: state.t,
            entries,
        })
    }
}

#[cfg(test)]
mod tests;
