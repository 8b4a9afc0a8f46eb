//! Command-line driver: argument parsing, dispatch, and report emission.
//!
//! Exit codes: 0 when every verdict passes, 1 when a mathematical verdict
//! fails, 2 when the invocation or an input file is invalid. The JSON report
//! goes to stdout and is byte-identical across runs on identical inputs; the
//! human summary and timing go to stderr.

mod battery;
mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use commands::EquationSource;
use report::RunReport;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "crmw",
    version,
    about = "Exact computer algebra for rank-deficient model hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Truncation order for series computations (the battery config governs
    /// its own order).
    #[arg(long, default_value_t = 6)]
    order: u32,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the human-readable summary on stderr.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a defining equation from seed data.
    Build {
        /// Seed-data JSON file.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Check the rank-condition identities on a defining equation.
    VerifyRank {
        /// Stored defining-equation JSON file.
        #[arg(long)]
        eq: Option<PathBuf>,
        /// Seed-data JSON file to build the equation from instead.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compute the symbols of a defining equation at the origin.
    Symbol {
        /// Stored defining-equation JSON file.
        #[arg(long)]
        eq: Option<PathBuf>,
        /// Seed-data JSON file to build the equation from instead.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decide the span conditions for a stored modified symbol.
    Realizable {
        /// Modified-symbol JSON file.
        #[arg(long)]
        symbol: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Realize a stored symbol as seed data and verify the round trip.
    Realize {
        /// Modified-symbol JSON file.
        #[arg(long)]
        symbol: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify the standard symmetry fields on a model.
    Symmetries {
        /// Seed-data JSON file.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Normalize a stored equation and reduce it to the pivot normal form.
    Normalize {
        /// Stored defining-equation JSON file.
        #[arg(long)]
        eq: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify an equivalence witness between two seed pairs.
    Equiv {
        /// Seed-data JSON file; pass exactly twice.
        #[arg(long = "model", action = clap::ArgAction::Append)]
        models: Vec<PathBuf>,
        /// Witness JSON file.
        #[arg(long)]
        witness: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the verification battery described by a config file.
    Battery {
        /// Battery config JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Criterion numbers to run, overriding the config selection.
        #[arg(long = "criteria", value_delimiter = ',')]
        criteria: Vec<u8>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn source<'a>(
    eq: &'a Option<PathBuf>,
    model: &'a Option<PathBuf>,
) -> Result<EquationSource<'a>, String> {
    match (eq, model) {
        (Some(p), None) => Ok(EquationSource::Equation(p)),
        (None, Some(p)) => Ok(EquationSource::Model(p)),
        _ => Err("pass exactly one of --eq or --model".into()),
    }
}

fn dispatch(command: &Command) -> (Result<RunReport, String>, &CommonOpts) {
    match command {
        Command::Build { model, common } => (commands::build(model, common.order), common),
        Command::VerifyRank { eq, model, common } => (
            source(eq, model).and_then(|s| commands::verify_rank(&s, common.order)),
            common,
        ),
        Command::Symbol { eq, model, common } => (
            source(eq, model).and_then(|s| commands::symbol(&s, common.order)),
            common,
        ),
        Command::Realizable { symbol, common } => {
            (commands::realizable(symbol, common.order), common)
        }
        Command::Realize { symbol, common } => (commands::realize(symbol, common.order), common),
        Command::Symmetries { model, common } => {
            (commands::symmetries(model, common.order), common)
        }
        Command::Normalize { eq, common } => (commands::normalize(eq, common.order), common),
        Command::Equiv {
            models,
            witness,
            common,
        } => (commands::equiv(models, witness, common.order), common),
        Command::Battery {
            config,
            criteria,
            common,
        } => (battery::battery(config, criteria), common),
    }
}

fn emit(report: &RunReport, common: &CommonOpts, started: Instant) -> ExitCode {
    let text = report.to_json();
    print!("{text}");
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if !common.json {
        eprintln!("{}", report.summary());
        eprintln!("elapsed: {:.3?}", started.elapsed());
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        (Ok(report), common) => emit(&report, common, started),
        (Err(msg), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
