//! Built-in property suite behind `cfns selftest`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{radial_identity_check, smoothing_constant_probe};
use crate::error::Result;
use crate::integrator::{Integrator, StepControl};
use crate::kernel::{periodic_gaussian, periodic_heat_kernel};
use crate::model::{
    build_initial_state, ChiFamily, ConsumptionFamily, InitSpec, InitialChemical, InitialVorticity,
    Model, PotentialSpec, SensitivityPair, SimState,
};
use crate::spectral::{GridSpec, RealField, SpectralOps};

/// Outcome of one property: measured value against its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// The limit is a lower bound rather than an upper one.
    pub lower_bound: bool,
    pub pass: bool,
}

impl CheckResult {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            limit,
            lower_bound: false,
            pass: value <= limit,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            limit,
            lower_bound: true,
            pass: value >= limit,
        }
    }

    fn failed(name: &str, err: &crate::Error) -> Self {
        CheckResult {
            name: format!("{name} ({err})"),
            value: f64::NAN,
            limit: f64::NAN,
            lower_bound: false,
            pass: false,
        }
    }
}

/// Random trigonometric polynomial with modes up to `max_mode` per axis.
pub fn random_field(grid: GridSpec, seed: u64, max_mode: i32) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kf = 2.0 * PI / grid.box_length();
    let terms: Vec<(f64, f64, f64, f64)> = (-max_mode..=max_mode)
        .flat_map(|m1| (0..=max_mode).map(move |m2| (m1, m2)))
        .map(|(m1, m2)| {
            (
                kf * f64::from(m1),
                kf * f64::from(m2),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    RealField::from_fn(grid, |x, y| {
        terms
            .iter()
            .map(|&(k1, k2, a, b)| {
                let ph = k1 * x + k2 * y;
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    })
    .expect("finite trigonometric sum")
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Worst relative round-trip error over `count` random fields.
pub fn round_trip_error(grid: GridSpec, count: u64) -> Result<f64> {
    let ops = SpectralOps::new(grid);
    let mut worst = 0.0_f64;
    for seed in 0..count {
        let f = random_field(grid, seed, 6);
        let back = ops.inverse_transform(&ops.forward_transform(&f)?);
        worst = worst.max(rel(back.max_abs_diff(&f), f.max_abs()));
    }
    Ok(worst)
}

/// Worst relative divergence and curl defect of the Biot–Savart velocity.
pub fn biot_savart_defects(grid: GridSpec, count: u64) -> Result<(f64, f64)> {
    let ops = SpectralOps::new(grid);
    let (mut div_worst, mut curl_worst) = (0.0_f64, 0.0_f64);
    for seed in 100..100 + count {
        let w = random_field(grid, seed, 6);
        let u = ops.biot_savart(&w)?;
        let scale = w.max_abs();
        div_worst = div_worst.max(rel(ops.divergence(&u)?.max_abs(), scale));
        let mean = w.mean();
        let target = w.map(|v| v - mean);
        curl_worst = curl_worst.max(rel(ops.curl(&u)?.max_abs_diff(&target), scale));
    }
    Ok((div_worst, curl_worst))
}

/// `e^{(t₁+t₂)Δ}f` against `e^{t₂Δ}e^{t₁Δ}f`, relative sup difference.
pub fn semigroup_error(grid: GridSpec) -> Result<f64> {
    let ops = SpectralOps::new(grid);
    let f = random_field(grid, 7, 6);
    let a = ops.heat_propagator(&ops.heat_propagator(&f, 0.3)?, 1.1)?;
    let b = ops.heat_propagator(&f, 1.4)?;
    Ok(rel(a.max_abs_diff(&b), b.max_abs()))
}

/// `sup|(K∗g)·∇f|` relative to its scale, Gaussian `g`, `f` of widths 1 and 2
/// centered in the box.
pub fn radial_identity(grid: GridSpec) -> Result<f64> {
    let ops = SpectralOps::new(grid);
    let g = periodic_gaussian(&grid, grid.center(), 1.0, 1.0)?;
    let f = periodic_gaussian(&grid, grid.center(), 2.0, 1.0)?;
    Ok(radial_identity_check(&ops, &g, &f)?.relative())
}

/// `count` times spread logarithmically over `[t0, t1]`.
pub fn log_times(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    let (a, b) = (t0.ln(), t1.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `((q, r, |α|), slope)` for one smoothing ratio.
pub type SmoothingSlope = ((f64, f64, u8), f64);

/// Log-log slopes of the heat smoothing ratios for `(q, r, |α|)` in
/// `{(∞,1,0), (2,1,0), (∞,1,1)}`, starting from a narrow Gaussian.
pub fn smoothing_slopes(grid: GridSpec, width: f64, times: &[f64]) -> Result<Vec<SmoothingSlope>> {
    let ops = SpectralOps::new(grid);
    let u0 = periodic_gaussian(&grid, grid.center(), width, 1.0)?;
    [
        (f64::INFINITY, 1.0, 0u8),
        (2.0, 1.0, 0),
        (f64::INFINITY, 1.0, 1),
    ]
    .into_iter()
    .map(|(q, r, a)| {
        Ok((
            (q, r, a),
            smoothing_constant_probe(&ops, &u0, q, r, a, times)?
                .fit
                .slope,
        ))
    })
    .collect()
}

/// Pure heat run from `Γ(t₀)` to `t₀ + t_end` against the closed form.
pub fn pure_heat_error(grid: GridSpec, t0: f64, t_end: f64, dt_max: f64) -> Result<f64> {
    let sens = SensitivityPair::new(
        ChiFamily::Constant { chi0: 0.0 },
        ConsumptionFamily::Linear { kappa: 0.0 },
        1.0,
    )?;
    let integ = Integrator::new(
        Model::new(grid, sens, PotentialSpec::Zero)?,
        StepControl::DEFAULT_CFL,
    )?;
    let c = grid.center();
    let start = SimState {
        n: periodic_heat_kernel(&grid, c, t0)?,
        c: RealField::zeros(grid),
        omega: RealField::zeros(grid),
        t: 0.0,
    };
    let ctrl = StepControl {
        dt_max,
        cfl: StepControl::DEFAULT_CFL,
        t_end,
        checkpoint_every: t_end.max(dt_max),
    };
    let end = integ.run(start, &ctrl, &mut |_| Ok(()))?;
    let exact = periodic_heat_kernel(&grid, c, t0 + t_end)?;
    Ok(rel(end.n.max_abs_diff(&exact), exact.max_abs()))
}

/// Worst relative drift of mass and circulation over a short coupled run.
pub fn conservation_drift(grid: GridSpec, t_end: f64) -> Result<f64> {
    let sens = SensitivityPair::new(
        ChiFamily::Constant { chi0: 0.5 },
        ConsumptionFamily::Linear { kappa: 0.5 },
        1.0,
    )?;
    let l = grid.box_length();
    let c = grid.center();
    let potential = PotentialSpec::GaussianWell {
        amplitude: 0.5,
        center: [c[0] + 1.0, c[1] - 0.5],
        width: l / 16.0,
    };
    let integ = Integrator::new(Model::new(grid, sens, potential)?, StepControl::DEFAULT_CFL)?;
    let (mass, gamma) = (1.0, 0.7);
    let init = InitSpec {
        mass,
        sigma_n: 1.0,
        center: c,
        c0: InitialChemical::Gaussian {
            amplitude: 0.5,
            width: l / 16.0,
        },
        omega0: InitialVorticity::Gaussian {
            circulation: gamma,
            width: 1.0,
        },
    };
    let state = build_initial_state(&grid, &init)?;
    let ctrl = StepControl {
        dt_max: 0.05,
        cfl: StepControl::DEFAULT_CFL,
        t_end,
        checkpoint_every: t_end / 5.0,
    };
    let mut worst = 0.0_f64;
    integ.run(state, &ctrl, &mut |s| {
        worst = worst
            .max((s.n.integral() - mass).abs() / mass)
            .max((s.omega.integral() - gamma).abs() / gamma);
        Ok(())
    })?;
    Ok(worst)
}

/// Observed temporal order from fixed-step runs to `t = 1` with 20, 40 and
/// 80 steps on a strongly coupled smooth state: `log₂(‖u₂₀ − u₄₀‖/‖u₄₀ − u₈₀‖)`.
pub fn self_convergence_order(grid: GridSpec) -> Result<f64> {
    let sens = SensitivityPair::new(
        ChiFamily::Constant { chi0: 1.0 },
        ConsumptionFamily::Linear { kappa: 1.0 },
        10.0,
    )?;
    let c = grid.center();
    let potential = PotentialSpec::GaussianWell {
        amplitude: 2.0,
        center: [c[0] + 1.0, c[1] - 0.5],
        width: 1.2,
    };
    let integ = Integrator::new(Model::new(grid, sens, potential)?, StepControl::DEFAULT_CFL)?;
    let init = InitSpec {
        mass: 5.0,
        sigma_n: 1.0,
        center: c,
        c0: InitialChemical::Gaussian {
            amplitude: 1.0,
            width: 1.5,
        },
        omega0: InitialVorticity::Gaussian {
            circulation: 5.0,
            width: 1.2,
        },
    };
    let start = build_initial_state(&grid, &init)?;
    let solve = |steps: usize| -> Result<SimState> {
        let dt = 1.0 / steps as f64;
        let mut s = start.clone();
        for _ in 0..steps {
            s = integ.step(&s, dt)?;
        }
        Ok(s)
    };
    let (coarse, mid, fine) = (solve(20)?, solve(40)?, solve(80)?);
    let dist = |a: &SimState, b: &SimState| {
        a.n.max_abs_diff(&b.n)
            .max(a.c.max_abs_diff(&b.c))
            .max(a.omega.max_abs_diff(&b.omega))
    };
    Ok((dist(&coarse, &mid) / dist(&mid, &fine)).log2())
}

/// Runs the suite. Each entry is independent; an error fails only its row.
pub fn run_selftest() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<f64>, limit: f64| {
        out.push(match r {
            Ok(v) => CheckResult::at_most(name, v, limit),
            Err(e) => CheckResult::failed(name, &e),
        });
    };
    let g128 = GridSpec::square(128, 2.0 * PI).expect("valid grid");
    push("transform round-trip", round_trip_error(g128, 20), 1e-12);
    match biot_savart_defects(g128, 20) {
        Ok((d, c)) => {
            push("Biot-Savart divergence", Ok(d), 1e-12);
            push("Biot-Savart curl", Ok(c), 1e-12);
        }
        Err(e) => push("Biot-Savart", Err(e), 1e-12),
    }
    push("heat semigroup", semigroup_error(g128), 1e-12);
    push(
        "radial Biot-Savart identity",
        radial_identity(GridSpec::square(1024, 400.0).expect("valid grid")),
        1e-8,
    );
    let probe_grid = GridSpec::square(1024, 40.0).expect("valid grid");
    match smoothing_slopes(probe_grid, 0.1, &log_times(0.1, 10.0, 12)) {
        Ok(rows) => {
            for ((q, r, a), slope) in rows {
                push(
                    &format!("smoothing slope (q={q}, r={r}, |a|={a})"),
                    Ok(slope.abs()),
                    0.1,
                );
            }
        }
        Err(e) => push("smoothing slope", Err(e), 0.1),
    }
    push(
        "pure-heat oracle",
        pure_heat_error(
            GridSpec::square(128, 50.0).expect("valid grid"),
            0.5,
            10.0,
            0.25,
        ),
        1e-8,
    );
    push(
        "conservation",
        conservation_drift(GridSpec::square(128, 32.0).expect("valid grid"), 5.0),
        1e-8,
    );
    match self_convergence_order(GridSpec::square(128, 24.0).expect("valid grid")) {
        Ok(order) => out.push(CheckResult::at_least("integrator order", order, 1.8)),
        Err(e) => out.push(CheckResult::failed("integrator order", &e)),
    }
    out
}

/// Plain-text table of results.
pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{:<width$}  {:>12.3e}  {} {:<9.1e} {}\n",
            r.name,
            r.value,
            if r.lower_bound { ">=" } else { "<=" },
            r.limit,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    s
}
