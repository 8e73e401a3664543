mod commands;
mod config;
mod failure;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Loaded, StrategyConfig};
use failure::{config_err, Failure};

#[derive(Parser)]
#[command(name = "noisyqma", version, about = "Graph-state verification lab for Merlin-Arthur protocols over noisy channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `params.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `params.shots`.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Use the strict stabilizer test in place of the relaxed tests.
    #[arg(long, global = true)]
    strict_test: bool,
    /// Where to write the JSON result (CSV for `gap --sweep`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the full protocol: Arthur picks the computation branch with
    /// probability q, otherwise one of the two relaxed graph-state tests,
    /// on the state Merlin sends through the noisy channel.
    Simulate {
        /// Overrides the configured Merlin strategy (honest, deviated,
        /// random-stabilizer).
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Completeness and soundness bounds as functions of q, the optimal
    /// branch probability q* and the closed-form gap for the default
    /// parameters, plus the gap of the strict-test protocol.
    Gap {
        /// Emit q* and the gap at q* over the configured epsilon grid as CSV.
        #[arg(long)]
        sweep: bool,
    },
    /// Cross-checks the stabilizer simulator, graph basis, purification
    /// bound on near-honest states and strict test against exact dense
    /// simulation. Exits 1 if any check fails.
    OracleCheck {
        /// Corrupts one tableau sign before comparing, to exercise the
        /// failure path.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Majority vote over r protocol runs, optionally with an error event
    /// shared by all runs of a vote.
    Amplify,
    /// Encodes a one-qubit witness in a small code, sends it through the
    /// channel, corrects, decodes and compares with the original.
    Theorem1,
}

fn load(common: &Common) -> Result<Loaded, Failure> {
    let mut loaded = Loaded::read(common.config.as_deref())?;
    let params = &mut loaded.config.params;
    if let Some(seed) = common.seed {
        params.seed = seed;
    }
    if let Some(shots) = common.shots {
        params.shots = shots;
    }
    if common.strict_test {
        loaded.config.test.strict = true;
    }
    loaded.config.params.validate().map_err(|e| config_err(e.to_string()))?;
    Ok(loaded)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut loaded = load(&cli.common)?;
    if let Command::Simulate { strategy: Some(name) } = &cli.command {
        loaded.config.strategy = StrategyConfig::from_name(name)?;
    }
    let emission = match cli.command {
        Command::Simulate { .. } => commands::simulate(&loaded)?,
        Command::Gap { sweep } => commands::gap(&loaded, sweep)?,
        Command::OracleCheck { inject_fault } => commands::oracle_check(&loaded, inject_fault)?,
        Command::Amplify => commands::amplify_cmd(&loaded)?,
        Command::Theorem1 => commands::theorem1(&loaded)?,
    };
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "seed {}", loaded.config.params.seed)?;
    stdout.write_all(emission.table.as_bytes())?;
    match (&emission.csv, &cli.common.out) {
        (Some(csv), Some(path)) => std::fs::write(path, csv).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?,
        (Some(csv), None) => stdout.write_all(csv.as_bytes())?,
        (None, Some(path)) => output::write_json(path, &emission.json)?,
        (None, None) => {}
    }
    Ok(emission.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.common.workers {
        Some(0) => {
            eprintln!("error: invalid configuration: --workers must be at least 1");
            return ExitCode::from(2);
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
