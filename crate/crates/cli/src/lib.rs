//! Command-line front end: parses a config, validates it, runs the
//! experiment and writes an output directory with a manifest.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spinbus", version, about = "Spin-chain quantum-bus experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perfect transfer on an engineered chain.
    Pst(RunArgs),
    /// Gaussian packet transfer in a parabolic field.
    Wavepacket(RunArgs),
    /// Effective qubit coupling through a spin ladder.
    Ladder(RunArgs),
    /// Quantum memory in a nuclear spin ring.
    Memory(RunArgs),
    /// Show experiments and their parameters.
    List {
        name: Option<String>,
        /// Print JSON schemas instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Result directory; must be absent or empty.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Runs the command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Pst(a) => run_experiment(ExperimentKind::Pst, &a),
        Command::Wavepacket(a) => run_experiment(ExperimentKind::Wavepacket, &a),
        Command::Ladder(a) => run_experiment(ExperimentKind::Ladder, &a),
        Command::Memory(a) => run_experiment(ExperimentKind::Memory, &a),
        Command::List { name, json } => list(name.as_deref(), json),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn list(name: Option<&str>, json: bool) -> Result<(), CliError> {
    let kinds = match name {
        Some(n) => vec![ExperimentKind::from_name(n)
            .ok_or_else(|| CliError::Validation(format!("unknown experiment `{n}`")))?],
        None => ExperimentKind::ALL.to_vec(),
    };
    if json {
        let schemas: Vec<_> = kinds.iter().map(|k| catalog::schema(*k)).collect();
        let value = if schemas.len() == 1 {
            schemas[0].clone()
        } else {
            serde_json::Value::Array(schemas)
        };
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        for k in kinds {
            print!("{}", catalog::table(k));
        }
    }
    Ok(())
}

pub fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<(), CliError> {
    let config = ExperimentConfig::load(&args.config)?;
    if config.experiment != kind {
        return Err(CliError::Validation(format!(
            "config is for `{}`, not `{kind}`",
            config.experiment
        )));
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        // fails only if a pool already exists, which keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let prepared = experiments::prepare(kind, &config.parameters)?;
    let started = chrono::Utc::now();
    let dest = output::resolve_destination(args.output.as_deref(), &config, started);
    output::check_destination(&dest)?;

    let clock = Instant::now();
    let artifacts = experiments::execute(&prepared)?;
    let manifest = output::Manifest::new(&config, started, clock.elapsed().as_secs_f64(), &artifacts);
    output::commit(&dest, &artifacts, &manifest)?;
    println!("{}", dest.display());
    Ok(())
}
