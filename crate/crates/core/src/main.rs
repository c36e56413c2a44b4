use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cfns::harness::{
    cmd_decay_study, cmd_print_config, cmd_rescale_check, cmd_run, cmd_selftest, exit_code,
    load_config, output_dir, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "cfns",
    version,
    about = "Chemotaxis-fluid pseudo-spectral solver and decay diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Integer rescaling factor for `rescale-check`.
    #[arg(long, global = true, default_value_t = 2)]
    k: u32,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run one simulation and write timeseries.csv.
    Run,
    /// Run, then fit decay exponents and profile trends.
    DecayStudy,
    /// Compare a run with its parabolically rescaled copy.
    RescaleCheck,
    /// Run the built-in property suite.
    Selftest,
    /// Print the effective configuration.
    PrintConfig,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CFNS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("CFNS_THREADS must be a non-negative integer (got `{raw}`)"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let code = if let Command::Selftest = cli.command {
        cmd_selftest()
    } else {
        match load_config(cli.config.as_deref()) {
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
            Ok(cfg) => {
                let dir = output_dir(&cfg, cli.out.as_deref());
                match cli.command {
                    Command::Run => cmd_run(&cfg, &dir),
                    Command::DecayStudy => cmd_decay_study(&cfg, &dir),
                    Command::RescaleCheck => cmd_rescale_check(&cfg, cli.k, &dir),
                    Command::PrintConfig => cmd_print_config(&cfg),
                    Command::Selftest => unreachable!("handled above"),
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
