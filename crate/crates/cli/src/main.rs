// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use squid_gates::compiler::Model;

mod config;
mod paper;
mod report;
mod run;

use config::{ScenarioConfig, TableFormat, PAPER_CONFIG};
use run::{CliError, RunContext};

#[derive(Debug, Parser)]
#[command(author, version, about = "rf-SQUID Lambda-system gate design and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario config (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// closed_form, effective or three_level; overrides the config
    #[arg(long, global = true)]
    model: Option<Model>,

    /// Format of tabular outputs
    #[arg(long, global = true, value_enum)]
    format: Option<TableFormat>,

    /// Flux grid size; overrides the config
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the device spectrum and the Lambda-system parameters
    Spectrum,
    /// Compile a gate and score it under the chosen model
    Gate,
    /// Compile and check a geometric rotation or phase gate
    Geometric,
    /// Time-resolved populations and Bloch components
    Dynamics,
    /// Off-resonance and large-detuning checklist
    Validate,
    /// Reproduce the reference-device numbers with the bundled config
    ValidatePaper,
}

fn context(cli: &Cli) -> Result<RunContext, CliError> {
    let mut config = match (&cli.config, &cli.command) {
        (Some(path), _) => ScenarioConfig::load(path).map_err(CliError::Usage)?,
        (None, Command::ValidatePaper) => ScenarioConfig::from_json(PAPER_CONFIG).map_err(CliError::Usage)?,
        (None, _) => return Err(CliError::Usage(anyhow::anyhow!("--config is required for this command"))),
    };
    if let Some(model) = cli.model {
        config.model = Some(model);
    }
    if let (Some(n), Some(device)) = (cli.grid_points, config.device.as_mut()) {
        device.grid.n_points = n;
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let format = cli.format.or(config.output.format).unwrap_or(TableFormat::Csv);
    Ok(RunContext {
        config,
        out_dir,
        format,
        seed: cli.seed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = context(&cli).and_then(|ctx| match cli.command {
        Command::Spectrum => run::run_spectrum(&ctx),
        Command::Gate => run::run_gate(&ctx),
        Command::Geometric => run::run_geometric(&ctx),
        Command::Dynamics => run::run_dynamics(&ctx),
        Command::Validate => run::run_validate(&ctx),
        Command::ValidatePaper => paper::run_validate_paper(&ctx),
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
