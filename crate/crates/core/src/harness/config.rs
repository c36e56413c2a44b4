//! Line-based run configuration: `section.key = value`, `#` comments.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagnostics::DiagConfig;
use crate::error::{Error, Result};
use crate::integrator::StepControl;
use crate::model::{
    ChiFamily, ConsumptionFamily, InitSpec, InitialChemical, InitialVorticity, PotentialSpec,
    SensitivityPair,
};
use crate::spectral::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiKind {
    Constant,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsumptionKind {
    Linear,
    Saturating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Zero,
    GaussianWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemicalKind {
    Constant,
    Gaussian,
    Algebraic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VorticityKind {
    Gaussian,
    Dipole,
}

/// Every tunable of a run. Omitted keys keep the values of [`RunConfig::default`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_points: usize,
    pub box_length: f64,
    pub dealias_fraction: f64,

    pub chi_family: ChiKind,
    pub chi0: f64,
    pub k_family: ConsumptionKind,
    pub kappa: f64,

    pub phi_family: PotentialKind,
    pub phi_amplitude: f64,
    /// `None` means the box center.
    pub phi_center: Option<[f64; 2]>,
    pub phi_width: f64,

    pub mass: f64,
    pub sigma_n: f64,
    pub center: Option<[f64; 2]>,
    pub c_bar: f64,
    pub c0_family: ChemicalKind,
    pub c0_width: f64,
    pub c0_power: f64,
    pub gamma: f64,
    pub sigma_omega: f64,
    pub omega0_family: VorticityKind,

    pub t_end: f64,
    pub dt_max: f64,
    pub cfl: f64,
    pub checkpoint_every: f64,
    pub t_min: f64,

    pub p_list: Vec<f64>,
    pub q_list: Vec<f64>,
    pub r_list: Vec<f64>,
    pub ball_radius: f64,
    pub profile_r: f64,
    pub fit_start: f64,
    pub fit_end: f64,

    pub output_dir: String,
    pub snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_points: 256,
            box_length: 100.0,
            dealias_fraction: GridSpec::DEFAULT_DEALIAS,
            chi_family: ChiKind::Constant,
            chi0: 0.1,
            k_family: ConsumptionKind::Linear,
            kappa: 0.1,
            phi_family: PotentialKind::Zero,
            phi_amplitude: 0.1,
            phi_center: None,
            phi_width: 4.0,
            mass: 0.5,
            sigma_n: 1.0,
            center: None,
            c_bar: 0.1,
            c0_family: ChemicalKind::Constant,
            c0_width: 4.0,
            c0_power: 0.1,
            gamma: 0.5,
            sigma_omega: 1.0,
            omega0_family: VorticityKind::Gaussian,
            t_end: 50.0,
            dt_max: 0.05,
            cfl: StepControl::DEFAULT_CFL,
            checkpoint_every: 1.0,
            t_min: 1.0,
            p_list: vec![2.0],
            q_list: vec![2.0, 4.0],
            r_list: vec![1.0, 1.5, 2.0],
            ball_radius: 2.0,
            profile_r: 2.0,
            fit_start: 5.0,
            fit_end: 50.0,
            output_dir: "out".into(),
            snapshots: false,
        }
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    Ok(x)
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(s.trim())).collect()
}

fn parse_pair(v: &str) -> std::result::Result<[f64; 2], String> {
    match parse_list(v)?.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("`{v}` must be two comma-separated numbers")),
    }
}

fn parse_choice<T: Copy>(v: &str, options: &[(&str, T)]) -> std::result::Result<T, String> {
    options
        .iter()
        .find(|(name, _)| *name == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            format!("`{v}` is not one of {}", names.join(", "))
        })
}

const CHI_KINDS: [(&str, ChiKind); 2] =
    [("constant", ChiKind::Constant), ("linear", ChiKind::Linear)];
const K_KINDS: [(&str, ConsumptionKind); 2] = [
    ("linear", ConsumptionKind::Linear),
    ("saturating", ConsumptionKind::Saturating),
];
const PHI_KINDS: [(&str, PotentialKind); 2] = [
    ("zero", PotentialKind::Zero),
    ("gaussian_well", PotentialKind::GaussianWell),
];
const C0_KINDS: [(&str, ChemicalKind); 3] = [
    ("constant", ChemicalKind::Constant),
    ("gaussian", ChemicalKind::Gaussian),
    ("algebraic", ChemicalKind::Algebraic),
];
const OMEGA_KINDS: [(&str, VorticityKind); 2] = [
    ("gaussian", VorticityKind::Gaussian),
    ("dipole", VorticityKind::Dipole),
];

fn choice_name<T: PartialEq>(v: T, options: &[(&'static str, T)]) -> &'static str {
    options
        .iter()
        .find(|(_, t)| *t == v)
        .map(|(n, _)| *n)
        .unwrap_or("?")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt_pair(v: [f64; 2]) -> String {
    format!("{}, {}", v[0], v[1])
}

impl RunConfig {
    /// All keys in emission order.
    pub const KEYS: [&'static str; 35] = [
        "grid.n_points",
        "grid.box_length",
        "grid.dealias_fraction",
        "model.chi_family",
        "model.chi0",
        "model.k_family",
        "model.kappa",
        "phi.family",
        "phi.amplitude",
        "phi.center",
        "phi.width",
        "init.mass",
        "init.sigma_n",
        "init.center",
        "init.c_bar",
        "init.c0_family",
        "init.c0_width",
        "init.c0_power",
        "init.gamma",
        "init.sigma_omega",
        "init.omega0_family",
        "time.t_end",
        "time.dt_max",
        "time.cfl",
        "time.checkpoint_every",
        "time.t_min",
        "diag.p_list",
        "diag.q_list",
        "diag.r_list",
        "diag.ball_radius",
        "diag.profile_r",
        "diag.fit_start",
        "diag.fit_end",
        "output.directory",
        "output.snapshots",
    ];

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "grid.n_points" => {
                self.n_points = v
                    .parse()
                    .map_err(|_| format!("`{v}` is not a non-negative integer"))?
            }
            "grid.box_length" => self.box_length = parse_f64(v)?,
            "grid.dealias_fraction" => self.dealias_fraction = parse_f64(v)?,
            "model.chi_family" => self.chi_family = parse_choice(v, &CHI_KINDS)?,
            "model.chi0" => self.chi0 = parse_f64(v)?,
            "model.k_family" => self.k_family = parse_choice(v, &K_KINDS)?,
            "model.kappa" => self.kappa = parse_f64(v)?,
            "phi.family" => self.phi_family = parse_choice(v, &PHI_KINDS)?,
            "phi.amplitude" => self.phi_amplitude = parse_f64(v)?,
            "phi.center" => self.phi_center = Some(parse_pair(v)?),
            "phi.width" => self.phi_width = parse_f64(v)?,
            "init.mass" => self.mass = parse_f64(v)?,
            "init.sigma_n" => self.sigma_n = parse_f64(v)?,
            "init.center" => self.center = Some(parse_pair(v)?),
            "init.c_bar" => self.c_bar = parse_f64(v)?,
            "init.c0_family" => self.c0_family = parse_choice(v, &C0_KINDS)?,
            "init.c0_width" => self.c0_width = parse_f64(v)?,
            "init.c0_power" => self.c0_power = parse_f64(v)?,
            "init.gamma" => self.gamma = parse_f64(v)?,
            "init.sigma_omega" => self.sigma_omega = parse_f64(v)?,
            "init.omega0_family" => self.omega0_family = parse_choice(v, &OMEGA_KINDS)?,
            "time.t_end" => self.t_end = parse_f64(v)?,
            "time.dt_max" => self.dt_max = parse_f64(v)?,
            "time.cfl" => self.cfl = parse_f64(v)?,
            "time.checkpoint_every" => self.checkpoint_every = parse_f64(v)?,
            "time.t_min" => self.t_min = parse_f64(v)?,
            "diag.p_list" => self.p_list = parse_list(v)?,
            "diag.q_list" => self.q_list = parse_list(v)?,
            "diag.r_list" => self.r_list = parse_list(v)?,
            "diag.ball_radius" => self.ball_radius = parse_f64(v)?,
            "diag.profile_r" => self.profile_r = parse_f64(v)?,
            "diag.fit_start" => self.fit_start = parse_f64(v)?,
            "diag.fit_end" => self.fit_end = parse_f64(v)?,
            "output.directory" => {
                if v.is_empty() {
                    return Err("directory must not be empty".into());
                }
                self.output_dir = v.to_string()
            }
            "output.snapshots" => {
                self.snapshots = match v {
                    "true" => true,
                    "false" => false,
                    _ => return Err(format!("`{v}` is not true or false")),
                }
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<String> {
        let s = match key {
            "grid.n_points" => self.n_points.to_string(),
            "grid.box_length" => self.box_length.to_string(),
            "grid.dealias_fraction" => self.dealias_fraction.to_string(),
            "model.chi_family" => choice_name(self.chi_family, &CHI_KINDS).into(),
            "model.chi0" => self.chi0.to_string(),
            "model.k_family" => choice_name(self.k_family, &K_KINDS).into(),
            "model.kappa" => self.kappa.to_string(),
            "phi.family" => choice_name(self.phi_family, &PHI_KINDS).into(),
            "phi.amplitude" => self.phi_amplitude.to_string(),
            "phi.center" => fmt_pair(self.phi_center()),
            "phi.width" => self.phi_width.to_string(),
            "init.mass" => self.mass.to_string(),
            "init.sigma_n" => self.sigma_n.to_string(),
            "init.center" => fmt_pair(self.center()),
            "init.c_bar" => self.c_bar.to_string(),
            "init.c0_family" => choice_name(self.c0_family, &C0_KINDS).into(),
            "init.c0_width" => self.c0_width.to_string(),
            "init.c0_power" => self.c0_power.to_string(),
            "init.gamma" => self.gamma.to_string(),
            "init.sigma_omega" => self.sigma_omega.to_string(),
            "init.omega0_family" => choice_name(self.omega0_family, &OMEGA_KINDS).into(),
            "time.t_end" => self.t_end.to_string(),
            "time.dt_max" => self.dt_max.to_string(),
            "time.cfl" => self.cfl.to_string(),
            "time.checkpoint_every" => self.checkpoint_every.to_string(),
            "time.t_min" => self.t_min.to_string(),
            "diag.p_list" => fmt_list(&self.p_list),
            "diag.q_list" => fmt_list(&self.q_list),
            "diag.r_list" => fmt_list(&self.r_list),
            "diag.ball_radius" => self.ball_radius.to_string(),
            "diag.profile_r" => self.profile_r.to_string(),
            "diag.fit_start" => self.fit_start.to_string(),
            "diag.fit_end" => self.fit_end.to_string(),
            "output.directory" => self.output_dir.clone(),
            "output.snapshots" => self.snapshots.to_string(),
            _ => return None,
        };
        Some(s)
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in Self::KEYS {
            let value = self.get(key).unwrap_or_default();
            let sec = key.split('.').next().unwrap_or("");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = sec;
            }
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn center(&self) -> [f64; 2] {
        self.center.unwrap_or([0.5 * self.box_length; 2])
    }

    pub fn phi_center(&self) -> [f64; 2] {
        self.phi_center.unwrap_or([0.5 * self.box_length; 2])
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_points, self.box_length, self.dealias_fraction)
    }

    pub fn sensitivity(&self) -> Result<SensitivityPair> {
        let chi = match self.chi_family {
            ChiKind::Constant => ChiFamily::Constant { chi0: self.chi0 },
            ChiKind::Linear => ChiFamily::Linear { chi0: self.chi0 },
        };
        let k = match self.k_family {
            ConsumptionKind::Linear => ConsumptionFamily::Linear { kappa: self.kappa },
            ConsumptionKind::Saturating => ConsumptionFamily::Saturating { kappa: self.kappa },
        };
        SensitivityPair::new(chi, k, 2.0 * self.c_bar)
    }

    pub fn potential(&self) -> PotentialSpec {
        match self.phi_family {
            PotentialKind::Zero => PotentialSpec::Zero,
            PotentialKind::GaussianWell => PotentialSpec::GaussianWell {
                amplitude: self.phi_amplitude,
                center: self.phi_center(),
                width: self.phi_width,
            },
        }
    }

    pub fn init_spec(&self) -> InitSpec {
        let c0 = match self.c0_family {
            ChemicalKind::Constant => InitialChemical::Constant { level: self.c_bar },
            ChemicalKind::Gaussian => InitialChemical::Gaussian {
                amplitude: self.c_bar,
                width: self.c0_width,
            },
            ChemicalKind::Algebraic => InitialChemical::Algebraic {
                level: self.c_bar,
                width: self.c0_width,
                power: self.c0_power,
            },
        };
        let omega0 = match self.omega0_family {
            VorticityKind::Gaussian => InitialVorticity::Gaussian {
                circulation: self.gamma,
                width: self.sigma_omega,
            },
            VorticityKind::Dipole => InitialVorticity::Dipole {
                strength: self.gamma,
                width: self.sigma_omega,
            },
        };
        InitSpec {
            mass: self.mass,
            sigma_n: self.sigma_n,
            center: self.center(),
            c0,
            omega0,
        }
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            dt_max: self.dt_max,
            cfl: self.cfl,
            t_end: self.t_end,
            checkpoint_every: self.checkpoint_every,
        }
    }

    pub fn diag_config(&self) -> DiagConfig {
        DiagConfig {
            p_list: self.p_list.clone(),
            q_list: self.q_list.clone(),
            r_list: self.r_list.clone(),
            ball_radius: self.ball_radius,
            profile_r: self.profile_r,
            center: self.center(),
            mass: self.mass,
            circulation: match self.omega0_family {
                VorticityKind::Gaussian => self.gamma,
                VorticityKind::Dipole => 0.0,
            },
        }
    }

    /// The parabolically rescaled configuration: box, widths and centers
    /// divided by `k`, times divided by `k²`, amplitudes unchanged.
    pub fn rescaled(&self, k: u32) -> RunConfig {
        let k = f64::from(k);
        let k2 = k * k;
        let div = |c: [f64; 2]| [c[0] / k, c[1] / k];
        RunConfig {
            box_length: self.box_length / k,
            phi_center: Some(div(self.phi_center())),
            phi_width: self.phi_width / k,
            sigma_n: self.sigma_n / k,
            center: Some(div(self.center())),
            c0_width: self.c0_width / k,
            sigma_omega: self.sigma_omega / k,
            t_end: self.t_end / k2,
            dt_max: self.dt_max / k2,
            checkpoint_every: self.checkpoint_every / k2,
            t_min: self.t_min / k2,
            fit_start: self.fit_start / k2,
            fit_end: self.fit_end / k2,
            ..self.clone()
        }
    }

    /// Range checks; `lines` maps keys to the line that set them.
    fn validate(&self, lines: &HashMap<String, usize>) -> Result<()> {
        let fail = |key: &str, msg: String| Error::Config {
            line: lines.get(key).copied().unwrap_or(0),
            key: key.to_string(),
            msg,
        };
        if self.n_points < 8 || !self.n_points.is_multiple_of(2) {
            return Err(fail(
                "grid.n_points",
                format!("{} must be even, ≥ 8", self.n_points),
            ));
        }
        if !(self.box_length > 0.0) {
            return Err(fail("grid.box_length", "must be > 0".into()));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(fail("grid.dealias_fraction", "must lie in (0, 1]".into()));
        }
        for (key, v) in [("model.chi0", self.chi0), ("model.kappa", self.kappa)] {
            if v < 0.0 {
                return Err(fail(key, "must be >= 0".into()));
            }
        }
        for (key, v) in [("init.mass", self.mass), ("init.c_bar", self.c_bar)] {
            if v < 0.0 {
                return Err(fail(key, "must be >= 0".into()));
            }
        }
        let h = self.box_length / self.n_points as f64;
        let max_width = self.box_length / 16.0;
        let mut widths = vec![
            ("init.sigma_n", self.sigma_n),
            ("init.sigma_omega", self.sigma_omega),
        ];
        if self.c0_family != ChemicalKind::Constant {
            widths.push(("init.c0_width", self.c0_width));
        }
        if self.phi_family == PotentialKind::GaussianWell {
            widths.push(("phi.width", self.phi_width));
        }
        for (key, w) in widths {
            if !(w > 0.0 && w <= max_width) {
                return Err(fail(
                    key,
                    format!("{w} must lie in (0, L/16 = {max_width}]"),
                ));
            }
            if w < 2.0 * h {
                return Err(fail(
                    key,
                    format!("{w} is under-resolved: need at least 2h = {}", 2.0 * h),
                ));
            }
        }
        if self.c0_family == ChemicalKind::Algebraic && !(self.c0_power > 0.0) {
            return Err(fail("init.c0_power", "must be > 0".into()));
        }
        if !(self.t_end >= 0.0) {
            return Err(fail("time.t_end", "must be >= 0".into()));
        }
        if !(self.dt_max > 0.0) {
            return Err(fail("time.dt_max", "must be > 0".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(fail("time.cfl", "must lie in (0, 1]".into()));
        }
        if !(self.checkpoint_every > 0.0) {
            return Err(fail("time.checkpoint_every", "must be > 0".into()));
        }
        if !(self.t_min >= 0.0) {
            return Err(fail("time.t_min", "must be >= 0".into()));
        }
        for (key, list) in [
            ("diag.p_list", &self.p_list),
            ("diag.q_list", &self.q_list),
            ("diag.r_list", &self.r_list),
        ] {
            if let Some(e) = list.iter().find(|e| **e < 1.0) {
                return Err(fail(key, format!("exponent {e} must be >= 1")));
            }
        }
        if !(self.ball_radius > 0.0) {
            return Err(fail("diag.ball_radius", "must be > 0".into()));
        }
        if self.ball_radius * self.t_end.sqrt() > self.box_length / 4.0 {
            return Err(fail(
                "diag.ball_radius",
                format!(
                    "ball R·sqrt(t_end) = {} exceeds L/4 = {}",
                    self.ball_radius * self.t_end.sqrt(),
                    self.box_length / 4.0
                ),
            ));
        }
        if !(self.profile_r >= 1.0) {
            return Err(fail("diag.profile_r", "must be >= 1".into()));
        }
        if !(self.fit_start > 0.0 && self.fit_end > self.fit_start) {
            return Err(fail(
                "diag.fit_end",
                "fit window must satisfy 0 < fit_start < fit_end".into(),
            ));
        }
        let t_sat = self
            .grid()
            .map_err(|e| fail("grid.n_points", e.to_string()))?
            .saturation_time();
        if self.fit_end > t_sat {
            return Err(fail(
                "diag.fit_end",
                format!(
                    "fit window end {} is past the saturation time {t_sat}",
                    self.fit_end
                ),
            ));
        }
        Ok(())
    }

    /// Checks a config that was built in code rather than parsed.
    pub fn check(&self) -> Result<()> {
        self.validate(&HashMap::new())
    }
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Config {
                line,
                key: body.to_string(),
                msg: "expected `section.key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if lines.contains_key(key) {
            return Err(Error::Config {
                line,
                key: key.to_string(),
                msg: "duplicate key".into(),
            });
        }
        cfg.set(key, value).map_err(|msg| Error::Config {
            line,
            key: key.to_string(),
            msg,
        })?;
        lines.insert(key.to_string(), line);
    }
    cfg.validate(&lines)?;
    Ok(cfg)
}
