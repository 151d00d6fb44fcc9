use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use macrovar_cli::config::{self, FileConfig, Overrides};
use macrovar_cli::error::CliError;
use macrovar_cli::runs::{self, RunOutput};

#[derive(Parser)]
#[command(
    name = "macrovar",
    version,
    about = "VAR impulse-response and DSGE simulation runs on annual country panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Dataset CSV (header: country,year,gdp,interest_rate,inflation,exchange_rate_usd)
    #[arg(long, global = true)]
    data: Option<PathBuf>,

    /// TOML run configuration; flags below override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory the run writes its artifacts into
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Country whose panel the run uses
    #[arg(long, global = true)]
    country: Option<String>,

    /// Comma-separated variables; the order fixes the shock ordering
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,

    /// VAR lag order (also caps the lagselect sweep)
    #[arg(long, global = true)]
    lags: Option<usize>,

    /// Impulse-response horizon
    #[arg(long, global = true)]
    horizon: Option<usize>,

    /// Bootstrap replications
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Bootstrap band coverage, strictly between 0 and 1
    #[arg(long, global = true)]
    level: Option<f64>,

    /// Bootstrap seed; irf runs refuse to start without one
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the VAR and write the coefficient and covariance tables
    Estimate,
    /// Orthogonalized impulse responses with bootstrap bands and a chart
    Irf,
    /// Companion-matrix spectral radius of the fitted VAR
    Stability,
    /// Information-criterion sweep over candidate lag orders
    Lagselect,
    /// Long-format summary table across all countries in the dataset
    Report,
    /// Deterministic simulation of the model economy
    Simulate,
}

fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    let file = match &cli.config {
        Some(path) => config::load_file(path).map_err(CliError::from)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        data: cli.data.clone(),
        out_dir: cli.out_dir.clone(),
        country: cli.country.clone(),
        vars: cli.vars.clone(),
        lags: cli.lags,
        horizon: cli.horizon,
        reps: cli.reps,
        level: cli.level,
        seed: cli.seed,
    };
    match cli.command {
        Command::Estimate => runs::run_estimate(&config::resolve_var_run(&file, &overrides)?),
        Command::Irf => runs::run_irf(&config::resolve_var_run(&file, &overrides)?),
        Command::Stability => runs::run_stability(&config::resolve_var_run(&file, &overrides)?),
        Command::Lagselect => runs::run_lagselect(&config::resolve_var_run(&file, &overrides)?),
        Command::Report => runs::run_report(&config::resolve_report_run(&file, &overrides)),
        Command::Simulate => runs::run_simulate(&config::resolve_dsge_run(&file, &overrides)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            for file in output.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
