use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lindblad_cli::config::{
    parse_config, BenchConfig, CompareConfig, MettsRunConfig, RunConfig, TrajConfig,
};
use lindblad_cli::{commands, CliError};

/// Integrate Lindblad master equations: deterministic evolutions,
/// cross-method comparisons, trajectory ensembles, thermal sampling, and
/// one-step benchmarks. Each subcommand reads a strict JSON config and
/// writes a CSV plus a reproducibility manifest.
#[derive(Parser)]
#[command(name = "lindblad", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `output_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Memory budget override in bytes.
    #[arg(long)]
    budget_bytes: Option<u64>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one integration and write the sampled density-matrix elements.
    Evolve(CommonArgs),
    /// Max-element deviations of two methods from a reference trajectory.
    Compare(CommonArgs),
    /// One-step timing sweep over chain lengths.
    Bench(CommonArgs),
    /// Trajectory-ensemble observables vs a master-equation reference.
    Traj(CommonArgs),
    /// Thermal sampling vs the dense Gibbs state.
    Metts(CommonArgs),
}

fn read_config_text(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))
}

fn resolve_out(arg: &Option<PathBuf>, from_config: &Option<String>) -> Result<PathBuf, CliError> {
    arg.clone()
        .or_else(|| from_config.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::Config("no output path: pass --out or set output_path".into()))
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Evolve(args) => {
            let mut cfg: RunConfig = parse_config(&read_config_text(&args.config)?)?;
            if let Some(b) = args.budget_bytes {
                cfg.memory_budget_bytes = b;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            let out = resolve_out(&args.out, &cfg.output_path)?;
            commands::evolve::execute(&cfg, &out)
        }
        Command::Compare(args) => {
            let mut cfg: CompareConfig = parse_config(&read_config_text(&args.config)?)?;
            if let Some(b) = args.budget_bytes {
                cfg.memory_budget_bytes = b;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            let out = resolve_out(&args.out, &cfg.output_path)?;
            commands::compare::execute(&cfg, &out)
        }
        Command::Bench(args) => {
            let mut cfg: BenchConfig = parse_config(&read_config_text(&args.config)?)?;
            if let Some(b) = args.budget_bytes {
                cfg.memory_budget_bytes = b;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            let out = resolve_out(&args.out, &cfg.output_path)?;
            commands::bench::execute(&cfg, &out)
        }
        Command::Traj(args) => {
            let mut cfg: TrajConfig = parse_config(&read_config_text(&args.config)?)?;
            if let Some(b) = args.budget_bytes {
                cfg.memory_budget_bytes = b;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            let out = resolve_out(&args.out, &cfg.output_path)?;
            commands::traj::execute(&cfg, &out)
        }
        Command::Metts(args) => {
            let mut cfg: MettsRunConfig = parse_config(&read_config_text(&args.config)?)?;
            if let Some(b) = args.budget_bytes {
                cfg.memory_budget_bytes = b;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            let out = resolve_out(&args.out, &cfg.output_path)?;
            commands::metts::execute(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
