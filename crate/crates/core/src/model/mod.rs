//! The coupled system: sensitivity functions, the external potential, initial
//! data, and the nonlinear (non-Laplacian) right-hand sides.

use crate::error::{invalid, Error, Result};
use crate::kernel::periodic_gaussian;
use crate::spectral::{GridSpec, RealField, SpectralCoeffs, SpectralOps, VectorField};

/// Chemotactic sensitivity `χ(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChiFamily {
    /// `χ(c) = χ₀`
    Constant { chi0: f64 },
    /// `χ(c) = χ₀ (1 + c)`
    Linear { chi0: f64 },
}

impl ChiFamily {
    pub fn value(&self, c: f64) -> f64 {
        match *self {
            ChiFamily::Constant { chi0 } => chi0,
            ChiFamily::Linear { chi0 } => chi0 * (1.0 + c),
        }
    }

    pub fn derivative(&self, _c: f64) -> f64 {
        match *self {
            ChiFamily::Constant { .. } => 0.0,
            ChiFamily::Linear { chi0 } => chi0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChiFamily::Constant { .. } => "constant",
            ChiFamily::Linear { .. } => "linear",
        }
    }

    pub fn chi0(&self) -> f64 {
        match *self {
            ChiFamily::Constant { chi0 } | ChiFamily::Linear { chi0 } => chi0,
        }
    }
}

/// Oxygen consumption rate `k(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConsumptionFamily {
    /// `k(c) = κ c`
    Linear { kappa: f64 },
    /// `k(c) = κ c / (1 + c)`
    Saturating { kappa: f64 },
}

impl ConsumptionFamily {
    pub fn value(&self, c: f64) -> f64 {
        match *self {
            ConsumptionFamily::Linear { kappa } => kappa * c,
            ConsumptionFamily::Saturating { kappa } => kappa * c / (1.0 + c),
        }
    }

    pub fn derivative(&self, c: f64) -> f64 {
        match *self {
            ConsumptionFamily::Linear { kappa } => kappa,
            ConsumptionFamily::Saturating { kappa } => kappa / ((1.0 + c) * (1.0 + c)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConsumptionFamily::Linear { .. } => "linear",
            ConsumptionFamily::Saturating { .. } => "saturating",
        }
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            ConsumptionFamily::Linear { kappa } | ConsumptionFamily::Saturating { kappa } => kappa,
        }
    }
}

/// A `(χ, k)` pair that passed the sign audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPair {
    chi: ChiFamily,
    consumption: ConsumptionFamily,
}

/// Slack allowed in the sampled sign audit.
pub const SIGN_AUDIT_TOL: f64 = 1e-12;
const AUDIT_SAMPLES: usize = 2001;

impl SensitivityPair {
    /// Checks `χ, k, χ', k' >= 0` on `[0, c_max]` and `k(0) = 0` by sampling.
    pub fn new(chi: ChiFamily, consumption: ConsumptionFamily, c_max: f64) -> Result<Self> {
        if !(c_max >= 0.0 && c_max.is_finite()) {
            return Err(invalid(format!(
                "audit range c_max must be >= 0 (got {c_max})"
            )));
        }
        if consumption.value(0.0).abs() > SIGN_AUDIT_TOL {
            return Err(invalid("consumption rate must vanish at c = 0"));
        }
        for s in 0..AUDIT_SAMPLES {
            let c = c_max * s as f64 / (AUDIT_SAMPLES - 1) as f64;
            let checks = [
                ("chi", chi.value(c)),
                ("chi'", chi.derivative(c)),
                ("k", consumption.value(c)),
                ("k'", consumption.derivative(c)),
            ];
            for (what, v) in checks {
                if !(v >= -SIGN_AUDIT_TOL) {
                    return Err(invalid(format!("{what}({c}) = {v} is negative")));
                }
            }
        }
        Ok(Self { chi, consumption })
    }

    pub fn chi(&self) -> ChiFamily {
        self.chi
    }

    pub fn consumption(&self) -> ConsumptionFamily {
        self.consumption
    }
}

/// Time-independent potential `φ` driving buoyancy in the vorticity equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// `φ(x) = -A exp(-|x - x₀|² / 2σ²)`, periodized.
    GaussianWell {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl PotentialSpec {
    fn validate(&self, grid: &GridSpec) -> Result<()> {
        if let PotentialSpec::GaussianWell {
            amplitude,
            center,
            width,
        } = *self
        {
            if !amplitude.is_finite() || !center.iter().all(|c| c.is_finite()) {
                return Err(invalid("potential parameters must be finite"));
            }
            check_width("potential width", width, grid)?;
        }
        Ok(())
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<RealField> {
        self.validate(grid)?;
        match *self {
            PotentialSpec::Zero => Ok(RealField::zeros(*grid)),
            PotentialSpec::GaussianWell {
                amplitude,
                center,
                width,
            } => {
                // the Gaussian with mass 2πσ² has unit peak
                let mass = 2.0 * std::f64::consts::PI * width * width;
                Ok(periodic_gaussian(grid, center, width, mass)?.scaled(-amplitude))
            }
        }
    }

    /// Analytic `∇φ` sampled on the grid.
    pub fn gradient(&self, grid: &GridSpec) -> Result<VectorField> {
        self.validate(grid)?;
        match *self {
            PotentialSpec::Zero => Ok(VectorField::zeros(*grid)),
            PotentialSpec::GaussianWell {
                amplitude,
                center,
                width,
            } => {
                let l = grid.box_length();
                let s2 = width * width;
                let axis = |c: f64| -> (Vec<f64>, Vec<f64>) {
                    (0..grid.n_points())
                        .map(|i| {
                            let d = grid.periodic_offset(grid.coord(i), c);
                            [-1.0, 0.0, 1.0].iter().fold((0.0, 0.0), |(g, dg), a| {
                                let s = d + a * l;
                                let e = (-0.5 * s * s / s2).exp();
                                (g + e, dg + s / s2 * e)
                            })
                        })
                        .unzip()
                };
                let (gx, dgx) = axis(center[0]);
                let (gy, dgy) = axis(center[1]);
                let n = grid.n_points();
                let mut v1 = Vec::with_capacity(grid.len());
                let mut v2 = Vec::with_capacity(grid.len());
                for j in 0..n {
                    for i in 0..n {
                        v1.push(amplitude * dgx[i] * gy[j]);
                        v2.push(amplitude * gx[i] * dgy[j]);
                    }
                }
                VectorField::new(
                    RealField::from_values(*grid, v1)?,
                    RealField::from_values(*grid, v2)?,
                )
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            PotentialSpec::Zero => true,
            PotentialSpec::GaussianWell { amplitude, .. } => amplitude == 0.0,
        }
    }
}

/// Initial oxygen profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialChemical {
    Constant {
        level: f64,
    },
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// `c̄ (1 + s(x)/σ²)^{-β}` where `s` is the smooth periodic surrogate
    /// `(L/π)² (sin²(π x₁'/L) + sin²(π x₂'/L))` of `|x'|²` about the center.
    Algebraic {
        level: f64,
        width: f64,
        power: f64,
    },
}

impl InitialChemical {
    pub fn peak(&self) -> f64 {
        match *self {
            InitialChemical::Constant { level } => level,
            InitialChemical::Gaussian { amplitude, .. } => amplitude,
            InitialChemical::Algebraic { level, .. } => level,
        }
    }
}

/// Initial vorticity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialVorticity {
    /// Single Gaussian carrying circulation `γ`.
    Gaussian { circulation: f64, width: f64 },
    /// Two opposite Gaussians of circulation `±strength` at `center ± (1.5σ, 0)`;
    /// total circulation zero.
    Dipole { strength: f64, width: f64 },
}

impl InitialVorticity {
    pub fn circulation(&self) -> f64 {
        match *self {
            InitialVorticity::Gaussian { circulation, .. } => circulation,
            InitialVorticity::Dipole { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitSpec {
    pub mass: f64,
    pub sigma_n: f64,
    pub center: [f64; 2],
    pub c0: InitialChemical,
    pub omega0: InitialVorticity,
}

/// Gaussian widths must fit the box (`≤ L/16`) and span at least two cells.
pub fn check_width(what: &str, width: f64, grid: &GridSpec) -> Result<()> {
    let l = grid.box_length();
    if !(width > 0.0 && width <= l / 16.0) {
        return Err(invalid(format!(
            "{what} {width} must lie in (0, L/16 = {}]",
            l / 16.0
        )));
    }
    if width < 2.0 * grid.spacing() {
        return Err(invalid(format!(
            "{what} {width} is under-resolved (grid spacing {})",
            grid.spacing()
        )));
    }
    Ok(())
}

/// `(n, c, ω)` at time `t`, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub n: RealField,
    pub c: RealField,
    pub omega: RealField,
    pub t: f64,
}

/// Relative floor below which negative density counts as a positivity failure.
pub const POSITIVITY_TOL: f64 = 1e-10;

impl SimState {
    pub fn grid(&self) -> &GridSpec {
        self.n.grid()
    }

    /// Tolerance `1e-10 · max n` shared by the positivity checks.
    pub fn positivity_tolerance(&self) -> f64 {
        POSITIVITY_TOL * self.n.max().max(0.0)
    }

    /// Checks `min n >= -tol`, `min c >= -tol_c` and `max c <= c_ceiling + tol_c`.
    pub fn check_bounds(&self, c_ceiling: f64) -> Result<()> {
        self.check_positivity(c_ceiling)?;
        let tol_c = POSITIVITY_TOL * c_ceiling.max(f64::MIN_POSITIVE);
        let max_c = self.c.max();
        if max_c > c_ceiling + tol_c {
            return Err(Error::Positivity {
                field: "c (upper bound)",
                value: max_c,
                tolerance: tol_c,
                t: self.t,
            });
        }
        Ok(())
    }

    /// Lower bounds only: `min n >= -1e-10 max n`, `min c >= -1e-10 c_scale`.
    pub fn check_positivity(&self, c_scale: f64) -> Result<()> {
        let tol = self.positivity_tolerance();
        let min_n = self.n.min();
        if min_n < -tol {
            return Err(Error::Positivity {
                field: "n",
                value: min_n,
                tolerance: tol,
                t: self.t,
            });
        }
        let tol_c = POSITIVITY_TOL * c_scale.max(f64::MIN_POSITIVE);
        let min_c = self.c.min();
        if min_c < -tol_c {
            return Err(Error::Positivity {
                field: "c",
                value: min_c,
                tolerance: tol_c,
                t: self.t,
            });
        }
        Ok(())
    }
}

fn periodic_surrogate_sq(grid: &GridSpec, x: f64, c: f64) -> f64 {
    let l = grid.box_length();
    let s = (std::f64::consts::PI * (x - c) / l).sin();
    let r = l / std::f64::consts::PI;
    r * r * s * s
}

/// Samples the initial data and checks the conserved integrals.
pub fn build_initial_state(grid: &GridSpec, init: &InitSpec) -> Result<SimState> {
    let InitSpec {
        mass,
        sigma_n,
        center,
        c0,
        omega0,
    } = *init;
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(invalid(format!("mass must be >= 0 (got {mass})")));
    }
    if !center.iter().all(|c| c.is_finite()) {
        return Err(invalid("center must be finite"));
    }
    check_width("sigma_n", sigma_n, grid)?;

    let n = if mass == 0.0 {
        RealField::zeros(*grid)
    } else {
        periodic_gaussian(grid, center, sigma_n, mass)?
    };

    let c = match c0 {
        InitialChemical::Constant { level } => {
            check_level(level)?;
            RealField::constant(*grid, level)?
        }
        InitialChemical::Gaussian { amplitude, width } => {
            check_level(amplitude)?;
            check_width("sigma_c", width, grid)?;
            let mass = 2.0 * std::f64::consts::PI * width * width * amplitude;
            periodic_gaussian(grid, center, width, mass)?
        }
        InitialChemical::Algebraic {
            level,
            width,
            power,
        } => {
            check_level(level)?;
            check_width("sigma_c", width, grid)?;
            if !(power > 0.0 && power.is_finite()) {
                return Err(invalid(format!("c0 decay power must be > 0 (got {power})")));
            }
            let w2 = width * width;
            RealField::from_fn(*grid, |x, y| {
                let s = periodic_surrogate_sq(grid, x, center[0])
                    + periodic_surrogate_sq(grid, y, center[1]);
                level * (1.0 + s / w2).powf(-power)
            })?
        }
    };

    let omega = match omega0 {
        InitialVorticity::Gaussian { circulation, width } => {
            if !circulation.is_finite() {
                return Err(invalid("circulation must be finite"));
            }
            check_width("sigma_omega", width, grid)?;
            periodic_gaussian(grid, center, width, circulation)?
        }
        InitialVorticity::Dipole { strength, width } => {
            if !strength.is_finite() {
                return Err(invalid("dipole strength must be finite"));
            }
            check_width("sigma_omega", width, grid)?;
            let d = 1.5 * width;
            let plus = periodic_gaussian(grid, [center[0] + d, center[1]], width, strength)?;
            let minus = periodic_gaussian(grid, [center[0] - d, center[1]], width, strength)?;
            plus.sub(&minus)
        }
    };

    check_integral("initial mass", n.integral(), mass)?;
    check_integral(
        "initial circulation",
        omega.integral(),
        omega0.circulation(),
    )?;

    Ok(SimState {
        n,
        c,
        omega,
        t: 0.0,
    })
}

fn check_level(v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(format!("oxygen level must be >= 0 (got {v})")));
    }
    Ok(())
}

fn check_integral(what: &str, got: f64, want: f64) -> Result<()> {
    if (got - want).abs() > 1e-10 * want.abs().max(1.0) {
        return Err(invalid(format!("{what} {got} deviates from {want}")));
    }
    Ok(())
}

/// Spectral right-hand side in coefficient form, as used by the integrator.
pub(crate) struct SpectralRhs {
    pub n: SpectralCoeffs,
    pub c: SpectralCoeffs,
    pub omega: SpectralCoeffs,
    /// `max |u| + max χ(c)|∇c|` at the evaluation point.
    pub max_speed: f64,
}

/// Evaluates the nonlinear terms of the system on one grid.
#[derive(Debug, Clone)]
pub struct Model {
    ops: SpectralOps,
    sensitivity: SensitivityPair,
    potential: PotentialSpec,
    grad_phi: Option<VectorField>,
}

impl Model {
    pub fn new(
        grid: GridSpec,
        sensitivity: SensitivityPair,
        potential: PotentialSpec,
    ) -> Result<Self> {
        let grad_phi = if potential.is_zero() {
            None
        } else {
            Some(potential.gradient(&grid)?)
        };
        Ok(Self {
            ops: SpectralOps::new(grid),
            sensitivity,
            potential,
            grad_phi,
        })
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    pub fn grid(&self) -> &GridSpec {
        self.ops.grid()
    }

    pub fn sensitivity(&self) -> &SensitivityPair {
        &self.sensitivity
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    fn check_state(&self, state: &SimState) -> Result<()> {
        let g = self.grid();
        if state.n.grid() != g || state.c.grid() != g || state.omega.grid() != g {
            return Err(invalid("state fields do not live on the model grid"));
        }
        Ok(())
    }

    /// Periodic velocity recovered from the vorticity.
    pub fn velocity(&self, state: &SimState) -> Result<VectorField> {
        self.check_state(state)?;
        self.ops.biot_savart(&state.omega)
    }

    /// Non-Laplacian parts `(N_n, N_c, N_ω)`:
    ///
    /// * `N_n = -∇·(u n) - ∇·(χ(c) n ∇c)`
    /// * `N_c = -u·∇c - k(c) n`
    /// * `N_ω = -∇·(u ω) - (∂₁n ∂₂φ - ∂₂n ∂₁φ)`
    pub fn nonlinear_rhs(&self, state: &SimState) -> Result<[RealField; 3]> {
        self.check_state(state)?;
        let n = self.ops.forward_transform(&state.n)?;
        let c = self.ops.forward_transform(&state.c)?;
        let w = self.ops.forward_transform(&state.omega)?;
        let rhs = self.rhs_coeffs(&n, &c, &w, state.t)?;
        Ok([
            self.ops.inverse_transform(&rhs.n),
            self.ops.inverse_transform(&rhs.c),
            self.ops.inverse_transform(&rhs.omega),
        ])
    }

    fn transform_product(&self, term: &str, t: f64, values: Vec<f64>) -> Result<SpectralCoeffs> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                term: term.to_string(),
                t,
            });
        }
        let f = RealField::from_raw(*self.grid(), values);
        let mut hat = self.ops.forward_unchecked(&f);
        self.ops.dealias_in_place(&mut hat);
        Ok(hat)
    }

    pub(crate) fn rhs_coeffs(
        &self,
        n_hat: &SpectralCoeffs,
        c_hat: &SpectralCoeffs,
        w_hat: &SpectralCoeffs,
        t: f64,
    ) -> Result<SpectralRhs> {
        let ops = &self.ops;
        let inv = |c: &SpectralCoeffs| ops.inverse_transform(c).into_values();

        let n = inv(n_hat);
        let c = inv(c_hat);
        let w = inv(w_hat);
        let (c1, c2) = ops.gradient_coeffs(c_hat);
        let (c1, c2) = (inv(&c1), inv(&c2));
        let (u1, u2) = ops.biot_savart_coeffs(w_hat);
        let (u1, u2) = (inv(&u1), inv(&u2));

        let chi = self.sensitivity.chi();
        let k = self.sensitivity.consumption();
        let len = n.len();

        let mut flux1 = Vec::with_capacity(len);
        let mut flux2 = Vec::with_capacity(len);
        let mut reaction = Vec::with_capacity(len);
        let mut wflux1 = Vec::with_capacity(len);
        let mut wflux2 = Vec::with_capacity(len);
        let mut max_u: f64 = 0.0;
        let mut max_drift: f64 = 0.0;
        for p in 0..len {
            let chi_c = chi.value(c[p]);
            max_u = max_u.max(u1[p].hypot(u2[p]));
            max_drift = max_drift.max(chi_c * c1[p].hypot(c2[p]));
            let drift = chi_c * n[p];
            flux1.push(u1[p] * n[p] + drift * c1[p]);
            flux2.push(u2[p] * n[p] + drift * c2[p]);
            reaction.push(-(u1[p] * c1[p] + u2[p] * c2[p]) - k.value(c[p]) * n[p]);
            wflux1.push(u1[p] * w[p]);
            wflux2.push(u2[p] * w[p]);
        }

        let f1 = self.transform_product("cell flux (advection + chemotaxis)", t, flux1)?;
        let f2 = self.transform_product("cell flux (advection + chemotaxis)", t, flux2)?;
        let mut rhs_n = ops.divergence_coeffs(&f1, &f2);
        negate(&mut rhs_n);

        let rhs_c = self.transform_product("oxygen advection + consumption", t, reaction)?;

        let g1 = self.transform_product("vorticity flux", t, wflux1)?;
        let g2 = self.transform_product("vorticity flux", t, wflux2)?;
        let mut rhs_w = ops.divergence_coeffs(&g1, &g2);
        negate(&mut rhs_w);

        if let Some(grad_phi) = &self.grad_phi {
            let (n1, n2) = ops.gradient_coeffs(n_hat);
            let (n1, n2) = (inv(&n1), inv(&n2));
            let p1 = grad_phi.x1.values();
            let p2 = grad_phi.x2.values();
            let torque: Vec<f64> = (0..len).map(|p| n1[p] * p2[p] - n2[p] * p1[p]).collect();
            let mut torque = self.transform_product("buoyancy torque", t, torque)?;
            // ∇n × ∇φ is a curl, so its mean vanishes identically
            torque.coeffs_mut()[0] = Default::default();
            for (r, q) in rhs_w.coeffs_mut().iter_mut().zip(torque.coeffs()) {
                *r -= q;
            }
        }

        Ok(SpectralRhs {
            n: rhs_n,
            c: rhs_c,
            omega: rhs_w,
            max_speed: max_u + max_drift,
        })
    }
}

fn negate(c: &mut SpectralCoeffs) {
    for z in c.coeffs_mut() {
        *z = -*z;
    }
}
