//! Command-line front end: configuration, orchestration and output files.

mod config;
mod output;
mod run;
mod selftest;
mod studies;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{
    parse_config, ChemicalKind, ChiKind, ConsumptionKind, PotentialKind, RunConfig, VorticityKind,
};
pub use output::{
    csv_header, csv_row, csv_text, parse_snapshot, read_csv, read_snapshot, snapshot_bytes,
    write_csv, write_snapshot, Snapshot,
};
pub use run::{metadata, simulate, RunOutcome, GAMMA_CONVENTION, T_MIN_CONVENTION};
pub use selftest::{
    biot_savart_defects, conservation_drift, format_table, log_times, pure_heat_error,
    radial_identity, random_field, round_trip_error, run_selftest, self_convergence_order,
    semigroup_error, smoothing_slopes, CheckResult, SmoothingSlope,
};
pub use studies::{
    decay_report_csv, decay_rows, decay_targets, profile_trend_csv, profile_trends,
    rescale_report_csv, run_rescale, weighted_norms, DecayRow, TrendRow, RESCALE_CURVE_TOL,
    RESCALE_INVARIANT_TOL, TREND_TIMES,
};

use crate::error::{Error, Result};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Reads and parses a config file, or returns defaults when `path` is `None`.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(&fs::read_to_string(p)?),
        None => parse_config(""),
    }
}

/// Output directory: the command-line value if given, else the config's.
pub fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&cfg.output_dir))
}

fn write_metadata(dir: &Path, cfg: &RunConfig, outcome: &RunOutcome) -> Result<()> {
    let mut text = String::new();
    for (k, v) in &outcome.series.metadata {
        text.push_str(&format!("{k}: {v}\n"));
    }
    text.push_str("\n# configuration\n");
    text.push_str(&cfg.emit());
    fs::write(dir.join("metadata.txt"), text)?;
    Ok(())
}

/// Runs one simulation and writes `timeseries.csv` (complete up to the last
/// good checkpoint even when the run aborts).
fn run_into(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    fs::create_dir_all(dir)?;
    let snap_dir = dir.join("snapshots");
    if cfg.snapshots {
        fs::create_dir_all(&snap_dir)?;
    }
    let outcome = simulate(cfg, cfg.snapshots.then_some(snap_dir.as_path()))?;
    write_csv(
        &dir.join("timeseries.csv"),
        &outcome.columns,
        &outcome.series,
    )?;
    write_metadata(dir, cfg, &outcome)?;
    Ok(outcome)
}

fn report(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

pub fn cmd_run(cfg: &RunConfig, dir: &Path) -> i32 {
    match run_into(cfg, dir) {
        Ok(outcome) => match &outcome.result {
            Ok(state) => {
                println!(
                    "run finished at t = {} with {} checkpoints; wrote {}",
                    state.t,
                    outcome.series.len(),
                    dir.join("timeseries.csv").display()
                );
                EXIT_OK
            }
            Err(e) => report(e),
        },
        Err(e) => report(&e),
    }
}

fn print_amplitudes(cfg: &RunConfig) {
    println!(
        "small-data amplitudes: m = {}, c_bar = {}, gamma = {} (empirical choice, not a proven smallness threshold)",
        cfg.mass, cfg.c_bar, cfg.gamma
    );
}

pub fn cmd_decay_study(cfg: &RunConfig, dir: &Path) -> i32 {
    print_amplitudes(cfg);
    let outcome = match run_into(cfg, dir) {
        Ok(o) => o,
        Err(e) => return report(&e),
    };
    if let Err(e) = &outcome.result {
        return report(e);
    }
    let rows = decay_rows(cfg, &outcome.series);
    let trends = profile_trends(&outcome.series, &TREND_TIMES);
    let written = fs::write(dir.join("decay_report.csv"), decay_report_csv(&rows))
        .and_then(|_| fs::write(dir.join("profile_trend.csv"), profile_trend_csv(&trends)));
    if let Err(e) = written {
        return report(&e.into());
    }
    println!("decay fits over t in [{}, {}]:", cfg.fit_start, cfg.fit_end);
    for r in &rows {
        println!(
            "  {:<18} slope {:>9.4}  target {:>7.4} ± {:<5} {}",
            r.quantity,
            r.fitted_slope,
            r.target_slope,
            r.band,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    println!("profile trends at t = {TREND_TIMES:?}:");
    for r in &trends {
        println!(
            "  {:<12} {:?} {}",
            r.quantity,
            r.values,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "weighted norms ({T_MIN_CONVENTION}, t_min = {}):",
        cfg.t_min
    );
    for (name, v) in weighted_norms(cfg, &outcome.series) {
        println!("  {name:<28} {v:.6e}");
    }
    if rows.iter().all(|r| r.pass) && trends.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_USAGE
    }
}

pub fn cmd_rescale_check(cfg: &RunConfig, k: u32, dir: &Path) -> i32 {
    let rep = match run_rescale(cfg, k) {
        Ok(r) => r,
        Err(e) => return report(&e),
    };
    let written = fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join("rescale_report.csv"), rescale_report_csv(&rep)));
    if let Err(e) = written {
        return report(&e.into());
    }
    let (inv, curve) = (rep.max_invariant_deviation(), rep.max_curve_deviation());
    println!("k = {k}: max invariant deviation {inv:.3e} (tol {RESCALE_INVARIANT_TOL:e}), max curve deviation {curve:.3e} (tol {RESCALE_CURVE_TOL})");
    if rep.passes(RESCALE_INVARIANT_TOL, RESCALE_CURVE_TOL) {
        EXIT_OK
    } else {
        EXIT_USAGE
    }
}

pub fn cmd_selftest() -> i32 {
    let results = run_selftest();
    print!("{}", format_table(&results));
    if results.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_USAGE
    }
}

pub fn cmd_print_config(cfg: &RunConfig) -> i32 {
    print!("{}", cfg.emit());
    EXIT_OK
}

#[cfg(test)]
mod tests;
