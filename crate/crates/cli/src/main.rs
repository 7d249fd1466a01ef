use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symspread_cli::{run, Command, CommandConfig, THREADS_ENV};
use symspread_core::census::Strategy;

/// Censuses and validators for symplectic semifield spreads of PG(5, q).
#[derive(Parser)]
#[command(name = "symspread", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; falls back to SYMSPREAD_THREADS.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the counts as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Classify every plane of PG(5, Q) against the secant variety.
    ClassifyPlanes {
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Census of planes of PG(5, q^2) disjoint from the secant variety.
    DisjointPlanes {
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Allow q > 2.
        #[arg(long)]
        long_run: bool,
    },
    /// Map sampled pairs of disjoint planes onto each other by lifted collineations.
    OrbitCheck {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long)]
        long_run: bool,
    },
    /// Search rank-6 linear sets of PG(5, 4) disjoint from the secant variety.
    SearchLinsets {
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// restricted-slice or full.
        #[arg(long, default_value = "restricted-slice", value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Candidates between checkpoint writes.
        #[arg(long, default_value_t = 10_000_000)]
        checkpoint_every: u64,
    },
    /// Validate a spread set (the Desarguesian one when no input is given).
    VerifySpread {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, alias = "spec")]
        input: Option<PathBuf>,
    },
    /// Derive the (f, g) system of a linear-set spec.
    DeriveFg {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, alias = "spec")]
        input: PathBuf,
    },
    /// Run the built-in small checks.
    Selftest,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: symspread_core::CensusError| e.to_string())
}

fn config(cli: Cli) -> CommandConfig {
    let mut cfg = CommandConfig::new(Command::Selftest);
    match cli.command {
        Sub::ClassifyPlanes { order } => {
            cfg.command = Command::ClassifyPlanes;
            cfg.order = order;
        }
        Sub::DisjointPlanes { q, long_run } => {
            cfg.command = Command::DisjointPlanes;
            cfg.q = q;
            cfg.long_run = long_run;
        }
        Sub::OrbitCheck { q, pairs, long_run } => {
            cfg.command = Command::OrbitCheck;
            cfg.q = q;
            cfg.pairs = pairs;
            cfg.long_run = long_run;
        }
        Sub::SearchLinsets { q, strategy, checkpoint, checkpoint_every } => {
            cfg.command = Command::SearchLinsets;
            cfg.q = q;
            cfg.strategy = strategy;
            cfg.checkpoint = checkpoint;
            cfg.checkpoint_every = checkpoint_every;
        }
        Sub::VerifySpread { q, input } => {
            cfg.command = Command::VerifySpread;
            cfg.q = q;
            cfg.input = input;
        }
        Sub::DeriveFg { q, input } => {
            cfg.command = Command::DeriveFg;
            cfg.q = q;
            cfg.input = Some(input);
        }
        Sub::Selftest => {}
    }
    let c = cli.common;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    cfg.out = c.out;
    cfg.csv = c.csv;
    cfg.timing = c.timing;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print = cli.common.print_config;
    let cfg = config(cli);
    if print {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("symspread: {e}");
            ExitCode::from(2)
        }
    }
}
