// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unravel::cli;
use unravel::config::RunConfig;
use unravel::Result;

#[derive(Parser)]
#[command(
    name = "unravel",
    version,
    about = "Pure-state unravelings of Markovian master equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the configured generator as CP, positive or not positive.
    Classify(RunArgs),
    /// Simulate a trajectory ensemble and write the averaged density matrix.
    Simulate(RunArgs),
    /// Compare the ensemble average against the master equation.
    Validate(RunArgs),
    /// List the built-in models and their default parameters.
    ListModels,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; overrides `out_dir` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn execute(command: Command) -> Result<i32> {
    // commands may run on a worker pool, so stdout is not locked up front
    match command {
        Command::ListModels => cli::cmd_list_models(&mut io::stdout()),
        Command::Classify(args) => {
            let config = load(&args)?;
            cli::with_workers(args.workers, || {
                cli::cmd_classify(&config, &mut io::stdout())
            })?
        }
        Command::Simulate(args) => {
            let config = load(&args)?;
            let dir = cli::out_dir(&config, args.out.as_deref());
            cli::with_workers(args.workers, || {
                cli::cmd_simulate(&config, &dir, &mut io::stdout())
            })?
        }
        Command::Validate(args) => {
            let config = load(&args)?;
            let dir = cli::out_dir(&config, args.out.as_deref());
            cli::with_workers(args.workers, || {
                cli::cmd_validate(&config, &dir, &mut io::stdout())
            })?
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if let Some(witness) = cli::witness_of(&err) {
                eprintln!("witness state: {}", cli::format_state(witness));
            }
            cli::exit_code(&err)
        }
    };
    ExitCode::from(code as u8)
}
