//! `spectral-qpe`: batch front end for phase-estimation eigenvalue runs.
//!
//! Subcommands read a JSON [`config::RunConfig`], apply flag overrides, and
//! write `histogram.csv` / `result.json` (or `trotter_bench.csv`) into the
//! output directory. Exit codes: 2 for configuration errors, 3 for runtime
//! failures, 4 when an oracle cross-check fails.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qpe_core::problems::ResourceInputs;

use crate::commands::RunOptions;
use crate::config::{Overrides, RunConfig, Slices};
pub use crate::error::{CliError, CliResult};

pub const LOG_ENV: &str = "SPECTRAL_QPE_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "spectral-qpe",
    version,
    about = "Phase-estimation eigenvalue solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the spectrum and report the dominant eigenvalue.
    Solve(RunArgs),
    /// Sample the spectrum and report every peak above threshold.
    Spectrum(RunArgs),
    /// Trotter operator error against the exact propagator over a slice sweep.
    TrotterBench(RunArgs),
    /// Qubit-count estimate for a many-particle simulation.
    Resources(ResourceArgs),
    /// Cross-check the exact pipeline against the reference diagonalization.
    OracleCheck(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "N")]
    pub index_qubits: Option<usize>,
    #[arg(long, value_name = "F", allow_hyphen_values = true)]
    pub time: Option<f64>,
    #[arg(long, value_name = "N|exact", value_parser = Slices::parse)]
    pub slices: Option<Slices>,
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    #[arg(long, value_name = "F")]
    pub threshold: Option<f64>,
    /// Worker threads for trial sampling; results do not depend on it.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub threads: usize,
    /// Output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub corrupt_qft_sign: bool,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            index_qubits: self.index_qubits,
            time: self.time,
            slices: self.slices,
            trials: self.trials,
            threshold: self.threshold,
            out: self.out.clone(),
        }
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            threads: self.threads,
            corrupt_qft_sign: self.corrupt_qft_sign,
        }
    }

    pub fn resolved_config(&self) -> CliResult<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        config.apply(&self.overrides());
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ResourceArgs {
    #[arg(long)]
    pub particles: usize,
    #[arg(long)]
    pub qubits_per_particle: usize,
    #[arg(long)]
    pub index_qubits: usize,
    #[arg(long, default_value_t = 0)]
    pub scratch_qubits: usize,
    /// Per-particle qubits for the pair held in position space.
    #[arg(long, default_value_t = 0)]
    pub position_qubits_per_particle: usize,
    #[arg(long)]
    pub interacting_pair: bool,
}

impl From<&ResourceArgs> for ResourceInputs {
    fn from(a: &ResourceArgs) -> Self {
        ResourceInputs {
            particles: a.particles,
            qubits_per_particle: a.qubits_per_particle,
            index_qubits: a.index_qubits,
            scratch_qubits: a.scratch_qubits,
            position_space_qubits_per_particle: a.position_qubits_per_particle,
            interacting_pair_in_position_space: a.interacting_pair,
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(args) => {
            commands::sampling_command("solve", args.resolved_config()?, &args.options())?;
        }
        Command::Spectrum(args) => {
            commands::sampling_command("spectrum", args.resolved_config()?, &args.options())?;
        }
        Command::TrotterBench(args) => {
            commands::trotter_bench(args.resolved_config()?)?;
        }
        Command::Resources(args) => {
            commands::resources(args.into())?;
        }
        Command::OracleCheck(args) => {
            commands::oracle_check(args.resolved_config()?, &args.options())?;
        }
    }
    Ok(())
}
