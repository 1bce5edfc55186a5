//! Command-line driver: synthesize geometry, solve pattern cuts, compare
//! configurations and sweep parameters.
//!
//! Exit codes: 0 ok, 2 config error, 3 solver error.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, RunConfig};

#[derive(Parser)]
#[command(
    name = "reflector",
    version,
    about = "Aperture-field solver for mmw/IR co-aperture reflector antennas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario/run configuration file (INI-style); defaults apply if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aperture grid cells per side (overrides the config).
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Stdout layout for tabular output.
    #[arg(long, default_value = "table", value_parser = ["table", "csv"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print and export the derived geometry of the configured scenarios.
    Synth(CommonArgs),
    /// Solve the configured scenarios: cut CSVs, metrics CSV, SVG plots.
    Run(CommonArgs),
    /// Run every configured scenario and write the comparison report.
    Compare(CommonArgs),
    /// Sweep one parameter over a list of values and tabulate the trends.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// One of: edge_taper_db, sub_diameter, grid_n, frequency, mirror_tilt_deg.
    #[arg(long)]
    parameter: Option<String>,
    /// Comma-separated values for the swept parameter.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
}

/// Errors mapped onto the documented exit codes.
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) => m,
        }
    }
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path).map_err(|e| CliError::Config(e.message))?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(n) = common.grid_n {
        cfg.grid_n = n;
    }
    Ok(cfg)
}

fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("REFLECTOR_THREADS") {
        let n: usize = raw.parse().map_err(|_| {
            CliError::Config(format!(
                "REFLECTOR_THREADS must be a positive integer, got `{raw}`"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Config(
                "REFLECTOR_THREADS must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    match cli.command {
        Command::Synth(common) => {
            let cfg = load(&common)?;
            commands::cmd_synth(&cfg, &common.format)
        }
        Command::Run(common) => {
            let cfg = load(&common)?;
            commands::cmd_run(&cfg)
        }
        Command::Compare(common) => {
            let cfg = load(&common)?;
            commands::cmd_compare(&cfg)
        }
        Command::Sweep(args) => {
            let cfg = load(&args.common)?;
            let parameter = args
                .parameter
                .or_else(|| cfg.sweep_parameter.clone())
                .ok_or_else(|| {
                    CliError::Config("sweep needs --parameter or a [sweep] section".into())
                })?;
            let values = if args.values.is_empty() {
                cfg.sweep_values.clone()
            } else {
                args.values
            };
            if values.is_empty() {
                return Err(CliError::Config(
                    "sweep needs --values or a [sweep] values list".into(),
                ));
            }
            commands::cmd_sweep(&cfg, &parameter, &values)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
