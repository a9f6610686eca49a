use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uav_los::env::{sample_grid, GridParams, Region};
use uav_los::experiment::{run_experiment, validate, ExperimentConfig, Preset, Suite};
use uav_los::Error;

#[derive(Parser)]
#[command(name = "uav-los", version, about = "LoS time between mobile ground users and UAVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config and write CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// CSV destination; stdout when neither this nor the config names one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run cross-checks and print one JSON line per check.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grid utilities.
    Grid {
        #[command(subcommand)]
        command: GridCommand,
    },
}

#[derive(Subcommand)]
enum GridCommand {
    /// Sample a city and print it as JSON.
    Dump {
        /// Take grid parameters from this config instead of --preset.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "urban")]
        preset: Preset,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::DegenerateGrid { .. } | Error::Json(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, seed, trials, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if out.is_some() {
                cfg.out = out;
            }
            cfg.validate()?;
            let result = run_experiment(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", result.csv);
            }
            eprint!("{}", result.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { suite, seed } => {
            let report = validate(suite, seed)?;
            print!("{}", report.to_jsonl());
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Grid { command: GridCommand::Dump { config, preset, seed, out } } => {
            let params = match config {
                Some(path) => load_config(&path)?.params()?,
                None => {
                    let (_, mu_b, mu_s) = preset
                        .table()
                        .ok_or_else(|| Error::Config("preset `custom` needs --config".into()))?;
                    GridParams::new(mu_b, mu_s, 8.0, Region::centered(400.0, 400.0))?
                }
            };
            let grid = sample_grid(&params, seed)?;
            emit(&(grid.to_json()? + "\n"), out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
