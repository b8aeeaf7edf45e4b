//! `anomdiss`: runs, sweeps and kinetic reports for shear-flow
//! advection-diffusion.
//!
//! Exit codes: 0 success, 2 bad input (usage, config, schema), 3 a run
//! violated an invariant.

mod commands;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{cmd_pair, cmd_report, cmd_run, cmd_sweep, Common, PairParams};

#[derive(Debug, Parser)]
#[command(
    name = "anomdiss",
    version,
    about = "Anomalous dissipation experiments on alternating shear flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (ANOMDISS_OUT takes precedence).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; overrides `[output] workers`.
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
    /// Progress messages on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate every (N, kappa) and store trajectories.
    Run {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Anomalous sweep plus smooth control; writes the report tables.
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Kinetic defect and residuals of stored trajectories.
    Pair {
        /// A run directory or a directory of run directories.
        dir: PathBuf,
        /// Take the `[kinetic]` table from this config.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Comma-separated epsilon list; overrides any config.
        #[arg(long, value_delimiter = ',', value_name = "EPS")]
        epsilon: Vec<f64>,
    },
    /// Join sweep and control reports of a sweep directory.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = Common {
        out: cli.out,
        workers: cli.workers,
        verbose: cli.verbose,
    };
    let outcome = match &cli.command {
        Command::Run { config } => cmd_run(config, &common),
        Command::Sweep { config } => cmd_sweep(config, &common),
        Command::Pair { dir, config, epsilon } => cmd_pair(
            dir,
            &PairParams {
                config: config.clone(),
                epsilon: epsilon.clone(),
            },
            &common,
        ),
        Command::Report { dir } => cmd_report(dir, &common),
    };
    match outcome {
        Ok(files) => {
            if common.verbose {
                for f in files {
                    eprintln!("anomdiss: wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("anomdiss: error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
