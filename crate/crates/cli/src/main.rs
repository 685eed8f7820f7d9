//! `sqbath`: build squeezed-reservoir lattice models, solve their steady
//! states, run noise sweeps and overlap optimization.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{exit_code, Options, EXIT_VALIDATION};
use config::ExperimentConfig;

/// Environment variable fixing the worker-thread count.
const THREADS_ENV: &str = "SQBATH_THREADS";

#[derive(Parser)]
#[command(name = "sqbath", version, about = "Steady states of lattices driven through a single squeezed reservoir")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    out: OutFlags,
}

#[derive(Args, Clone)]
struct OutFlags {
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp from output headers
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model and write its coupling matrix, target and reports
    Build(Common),
    /// Solve the steady state and report purity, fidelity and nullifiers
    Steady {
        #[command(flatten)]
        common: Common,
        /// Local damping rate on every site
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Print the Lyapunov residual
        #[arg(long)]
        residual: bool,
    },
    /// Sweep the local damping with random Hamiltonian perturbations
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Master seed, overriding the config
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Equalize the normal-mode overlaps of a chain at fixed mean coupling
    Optimize(Common),
    /// Bloch-Messiah decomposition of a Bogoliubov transform document
    Decompose {
        /// JSON document with `x` and `y` complex matrices
        matrix: PathBuf,
        #[command(flatten)]
        out: OutFlags,
    },
}

fn options(out: &OutFlags, seed: Option<u64>, residual: bool) -> Options {
    Options {
        seed,
        out: out.out.clone(),
        residual,
        timestamp: !out.no_timestamp,
    }
}

fn run(cli: Cli) -> sqbath::Result<i32> {
    let load = |c: &Common| ExperimentConfig::load(&c.config);
    match cli.command {
        Command::Build(c) => commands::cmd_build(&load(&c)?, &options(&c.out, None, false)),
        Command::Steady { common, gamma, residual } => {
            commands::cmd_steady(&load(&common)?, &options(&common.out, None, residual), gamma)
        }
        Command::Sweep { common, seed } => commands::cmd_sweep(&load(&common)?, &options(&common.out, seed, false)),
        Command::Optimize(c) => commands::cmd_optimize(&load(&c)?, &options(&c.out, None, false)),
        Command::Decompose { matrix, out } => commands::cmd_decompose(&matrix, &options(&out, None, false)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {THREADS_ENV} ignored: {e}");
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            ExitCode::from(if code == 0 { EXIT_VALIDATION } else { code } as u8)
        }
    }
}
