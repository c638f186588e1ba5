//! `sobe`: solve the quarter-plane problem, evaluate its linear part, and run
//! the estimate probes.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
//! (including a failed verification verdict).

mod config;
mod output;
mod solve;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "sobe", version, about = "Quarter-plane solver for the sixth-order Boussinesq equation")]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving manifests, CSV tables and field dumps.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides the sweep seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and transforms.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the nonlinear problem with the smallest contracting λ.
    Solve,
    /// Evaluate the linear representation only.
    Linear,
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Tabulate the estimate probes over the configured (s, σ) grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Roots,
    Lemmas,
    Kato,
    Duhamel,
    Bilinear,
    All,
}

/// An error together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: String) -> Self {
        Self { code: 1, message }
    }

    pub fn numerical(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<sobe_core::Error> for Failure {
    fn from(e: sobe_core::Error) -> Self {
        let message = format!("{}: {e}", e.module());
        if e.is_numerical() {
            Self::numerical(message)
        } else {
            Self::config(message)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.sweep.seed = seed;
    }
    cfg.validate()?;
    if cli.threads == 0 {
        return Err(Failure::config("--threads must be at least 1".into()));
    }
    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Failure::config(format!("cannot start worker pool: {e}")))?;
    let out = output::OutDir::new(cli.out_dir, &cfg);
    pool.install(|| match cli.command {
        Command::Solve => solve::solve(&cfg, &out),
        Command::Linear => solve::linear(&cfg, &out),
        Command::Verify { suite } => verify::verify(suite, &cfg, &out),
        Command::Sweep => verify::sweep(&cfg, &out),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
