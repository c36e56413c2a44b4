//! One simulation from a config, with checkpoint diagnostics.

use std::path::Path;

use crate::diagnostics::{CheckpointRecord, Diagnostics, TimeSeries};
use crate::error::Result;
use crate::integrator::Integrator;
use crate::model::{build_initial_state, Model, SimState};

use super::config::RunConfig;
use super::output::write_snapshot;

/// Note recorded with every series about the velocity reconstruction.
pub const GAMMA_CONVENTION: &str = "velocity is recovered from omega minus its spatial mean, \
so a nonzero circulation gamma acts on the torus without its mean-rotation part";

/// Note recorded with every series about weighted suprema.
pub const T_MIN_CONVENTION: &str =
    "weighted suprema over t >= 0 are evaluated over checkpoints with t >= t_min";

/// Output of a completed or aborted run.
#[derive(Debug)]
pub struct RunOutcome {
    pub columns: Vec<String>,
    pub initial: SimState,
    pub series: TimeSeries,
    /// Final state, or the error that stopped the run early.
    pub result: Result<SimState>,
}

pub fn metadata(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut m = vec![
        (
            "grid".into(),
            format!("{}^2, L = {}", cfg.n_points, cfg.box_length),
        ),
        (
            "model".into(),
            format!(
                "chi {:?}(chi0 = {}), k {:?}(kappa = {}), phi {:?}",
                cfg.chi_family,
                cfg.chi0,
                cfg.k_family,
                cfg.kappa,
                cfg.potential()
            ),
        ),
        (
            "init".into(),
            format!(
                "m = {}, sigma_n = {}, c_bar = {} ({:?}), gamma = {} ({:?}, sigma_omega = {})",
                cfg.mass,
                cfg.sigma_n,
                cfg.c_bar,
                cfg.c0_family,
                cfg.gamma,
                cfg.omega0_family,
                cfg.sigma_omega
            ),
        ),
        ("gamma_convention".into(), GAMMA_CONVENTION.into()),
        (
            "t_min".into(),
            format!("{} ({T_MIN_CONVENTION})", cfg.t_min),
        ),
    ];
    m.push((
        "saturation_time".into(),
        format!("{}", cfg.box_length * cfg.box_length / 64.0),
    ));
    m
}

/// Builds the initial state, integrates to `t_end` and measures every
/// checkpoint. With `snapshot_dir`, all three fields are written at each
/// checkpoint. A numerical failure is reported in [`RunOutcome::result`]
/// along with the records gathered before it.
pub fn simulate(cfg: &RunConfig, snapshot_dir: Option<&Path>) -> Result<RunOutcome> {
    cfg.check()?;
    let grid = cfg.grid()?;
    let model = Model::new(grid, cfg.sensitivity()?, cfg.potential())?;
    let integrator = Integrator::new(model, cfg.cfl)?;
    let diagnostics = Diagnostics::new(grid, cfg.diag_config())?;
    let initial = build_initial_state(&grid, &cfg.init_spec())?;
    let ctrl = cfg.step_control();
    ctrl.validate()?;

    let mut series = TimeSeries::new(metadata(cfg));
    let mut index = 0usize;
    let result = integrator.run(initial.clone(), &ctrl, &mut |state: &SimState| {
        let record: CheckpointRecord = diagnostics.measure(state)?;
        series.push(record)?;
        if let Some(dir) = snapshot_dir {
            for (name, field) in [("n", &state.n), ("c", &state.c), ("omega", &state.omega)] {
                write_snapshot(
                    &dir.join(format!("{name}_{index:05}.cfns")),
                    name,
                    field,
                    state.t,
                )?;
            }
        }
        index += 1;
        Ok(())
    });
    Ok(RunOutcome {
        columns: diagnostics.config().columns(),
        initial,
        series,
        result,
    })
}
