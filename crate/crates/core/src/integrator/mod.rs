//! Second-order exponential time differencing (ETDRK2) for the coupled
//! system. The Laplacian is integrated exactly mode by mode; the nonlinear
//! terms enter through the `φ₁`, `φ₂` functions of `z = -|k|² dt`.

use rustfft::num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{Model, SimState, SpectralRhs};
use crate::spectral::SpectralCoeffs;

/// Speed floor in the CFL bound, so a quiescent flow still yields a finite step.
pub const SPEED_FLOOR: f64 = 1e-8;

/// Below this `|z|` the φ-functions switch to their Taylor series.
const TAYLOR_THRESHOLD: f64 = 0.5;
const TAYLOR_TERMS: usize = 24;

/// `φ₁(z) = (e^z - 1) / z`, with `φ₁(0) = 1`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < TAYLOR_THRESHOLD {
        taylor(z, 1)
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (e^z - 1 - z) / z²`, with `φ₂(0) = 1/2`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < TAYLOR_THRESHOLD {
        taylor(z, 2)
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// `Σ_j z^j / (j + shift)!`, summed from the smallest term up.
fn taylor(z: f64, shift: usize) -> f64 {
    let mut terms = [0.0; TAYLOR_TERMS];
    let mut fact: f64 = (1..=shift).map(|v| v as f64).product();
    let mut pow = 1.0;
    for (j, t) in terms.iter_mut().enumerate() {
        *t = pow / fact;
        pow *= z;
        fact *= (j + shift + 1) as f64;
    }
    terms.iter().rev().sum()
}

/// Step-size and output cadence of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub dt_max: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub checkpoint_every: f64,
}

impl StepControl {
    pub const DEFAULT_CFL: f64 = 0.4;

    /// `t_end = 0` is accepted and yields only the initial checkpoint.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(invalid(format!("dt_max must be > 0 (got {})", self.dt_max)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid(format!(
                "cfl must lie in (0, 1] (got {})",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be >= 0 (got {})", self.t_end)));
        }
        if !(self.checkpoint_every > 0.0 && self.checkpoint_every.is_finite()) {
            return Err(invalid(format!(
                "checkpoint_every must be > 0 (got {})",
                self.checkpoint_every
            )));
        }
        Ok(())
    }
}

/// Spectral coefficients of a state, ready for a step.
struct Stage {
    n: SpectralCoeffs,
    c: SpectralCoeffs,
    omega: SpectralCoeffs,
    t: f64,
}

/// Per-mode `(e^z, dt φ₁(z), dt φ₂(z))` for one step size.
struct Propagators {
    exp: Vec<f64>,
    dt_phi1: Vec<f64>,
    dt_phi2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Integrator {
    model: Model,
    cfl: f64,
}

impl Integrator {
    pub fn new(model: Model, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(invalid(format!("cfl must lie in (0, 1] (got {cfl})")));
        }
        Ok(Self { model, cfl })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn prepare(&self, state: &SimState) -> Result<(Stage, SpectralRhs)> {
        let ops = self.model.ops();
        let transform = |f, term: &str| {
            ops.forward_transform(f).map_err(|_| Error::NonFinite {
                term: term.to_string(),
                t: state.t,
            })
        };
        let stage = Stage {
            n: transform(&state.n, "cell density")?,
            c: transform(&state.c, "oxygen")?,
            omega: transform(&state.omega, "vorticity")?,
            t: state.t,
        };
        let rhs = self
            .model
            .rhs_coeffs(&stage.n, &stage.c, &stage.omega, state.t)?;
        Ok((stage, rhs))
    }

    fn limit_for_speed(&self, speed: f64) -> f64 {
        self.cfl * self.model.grid().spacing() / speed.max(SPEED_FLOOR)
    }

    /// Largest admissible step `cfl · h / max(|u|∞ + max χ(c)|∇c|, ε)`.
    pub fn cfl_limit(&self, state: &SimState) -> Result<f64> {
        let (_, rhs) = self.prepare(state)?;
        Ok(self.limit_for_speed(rhs.max_speed))
    }

    fn propagators(&self, dt: f64) -> Propagators {
        let ops = self.model.ops();
        let n = ops.grid().n_points();
        let mut p = Propagators {
            exp: Vec::with_capacity(n * n),
            dt_phi1: Vec::with_capacity(n * n),
            dt_phi2: Vec::with_capacity(n * n),
        };
        for j in 0..n {
            for i in 0..n {
                let z = -ops.k_squared(i, j) * dt;
                p.exp.push(z.exp());
                p.dt_phi1.push(dt * phi1(z));
                p.dt_phi2.push(dt * phi2(z));
            }
        }
        p
    }

    fn advance(&self, stage: &Stage, rhs0: &SpectralRhs, dt: f64, t_new: f64) -> Result<SimState> {
        let p = self.propagators(dt);
        let predict = |f: &SpectralCoeffs, nl: &SpectralCoeffs| {
            let coeffs: Vec<Complex64> = f
                .coeffs()
                .iter()
                .zip(nl.coeffs())
                .enumerate()
                .map(|(m, (&a, &b))| a * p.exp[m] + b * p.dt_phi1[m])
                .collect();
            SpectralCoeffs::from_raw(*f.grid(), coeffs)
        };
        let a_n = predict(&stage.n, &rhs0.n);
        let a_c = predict(&stage.c, &rhs0.c);
        let a_w = predict(&stage.omega, &rhs0.omega);
        let rhs1 = self.model.rhs_coeffs(&a_n, &a_c, &a_w, stage.t + dt)?;

        let correct = |a: SpectralCoeffs, nl1: &SpectralCoeffs, nl0: &SpectralCoeffs| {
            let mut a = a;
            for (m, z) in a.coeffs_mut().iter_mut().enumerate() {
                *z += (nl1.coeffs()[m] - nl0.coeffs()[m]) * p.dt_phi2[m];
            }
            a
        };
        let ops = self.model.ops();
        let state = SimState {
            n: ops.inverse_transform(&correct(a_n, &rhs1.n, &rhs0.n)),
            c: ops.inverse_transform(&correct(a_c, &rhs1.c, &rhs0.c)),
            omega: ops.inverse_transform(&correct(a_w, &rhs1.omega, &rhs0.omega)),
            t: t_new,
        };
        for (name, f) in [
            ("cell density", &state.n),
            ("oxygen", &state.c),
            ("vorticity", &state.omega),
        ] {
            if f.first_non_finite().is_some() {
                return Err(Error::NonFinite {
                    term: name.to_string(),
                    t: t_new,
                });
            }
        }
        Ok(state)
    }

    /// One ETDRK2 step of size `dt`; rejects steps above the CFL limit.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("time step must be > 0 (got {dt})")));
        }
        let (stage, rhs) = self.prepare(state)?;
        let limit = self.limit_for_speed(rhs.max_speed);
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        let next = self.advance(&stage, &rhs, dt, state.t + dt)?;
        next.check_positivity(state.c.max_abs())?;
        Ok(next)
    }

    /// Integrates to `ctrl.t_end`. The sink receives the initial state and
    /// then the state at every multiple of `checkpoint_every` (steps are
    /// shortened to land on those times), in time order.
    pub fn run(
        &self,
        initial: SimState,
        ctrl: &StepControl,
        sink: &mut dyn FnMut(&SimState) -> Result<()>,
    ) -> Result<SimState> {
        ctrl.validate()?;
        if ctrl.cfl != self.cfl {
            return Err(invalid(
                "step control and integrator disagree on the CFL number",
            ));
        }
        let c_ceiling = initial.c.max_abs();
        initial.check_bounds(c_ceiling)?;
        sink(&initial)?;

        let t0 = initial.t;
        let t_end = t0 + ctrl.t_end;
        let checkpoint_time = |k: u64| t0 + k as f64 * ctrl.checkpoint_every;
        let mut state = initial;
        let mut next_index: u64 = 1;
        let mut next_checkpoint = checkpoint_time(next_index).min(t_end);

        while state.t < t_end {
            let last_good_t = state.t;
            let abort = |e: Error| Error::RunAborted {
                last_good_t,
                source: Box::new(e),
            };
            let (stage, rhs) = self.prepare(&state).map_err(abort)?;
            let mut dt = ctrl.dt_max.min(self.limit_for_speed(rhs.max_speed));
            let mut t_new = state.t + dt;
            let lands = t_new >= next_checkpoint * (1.0 - 1e-14);
            if lands {
                t_new = next_checkpoint;
                dt = next_checkpoint - state.t;
            }
            state = self.advance(&stage, &rhs, dt, t_new).map_err(abort)?;
            state.check_bounds(c_ceiling).map_err(abort)?;
            if lands {
                sink(&state)?;
                next_index += 1;
                next_checkpoint = checkpoint_time(next_index).min(t_end);
                if next_checkpoint <= state.t {
                    break;
                }
            }
        }
        Ok(state)
    }
}
