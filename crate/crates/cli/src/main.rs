use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Homology of 1-periodic cell complexes from their finite window data.
#[derive(Debug, Parser)]
#[command(name = "perihom", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args, Clone)]
pub struct Global {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized suites (overrides the config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print no report; the exit code carries the outcome.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// How lifts along `i` are chosen when building the monodromy.
    #[arg(long, global = true, value_enum, default_value_t = Lift::Stable)]
    lift: Lift,
    /// Run on one thread even when built with parallel support.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lift {
    Plain,
    Adapted,
    Stable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a complex file parses and describes a chain complex.
    Validate { file: PathBuf },
    /// Betti numbers of the window pair and of the quotient G_n.
    Homology {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Monodromy endomorphisms with their generalized images and kernels.
    Monodromy {
        file: PathBuf,
        /// A single degree, or `all`.
        #[arg(long, default_value = "all")]
        degree: String,
        /// Include i, j and the monodromy matrices.
        #[arg(long)]
        emit_matrices: bool,
    },
    /// Toroidal dimensions of H(G_n), optionally with explicit cycles.
    Toroidal {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Build a toroidal cycle from each basis class of gim(M_V).
        #[arg(long)]
        recover: bool,
        /// Also search for the least n ≤ this bound where every degree is iso.
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Decide whether a cycle of G_n is toroidal.
    Classify {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// JSON file with the cycle's degree and entries.
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Monodromy along a filtration and the unimodality checks.
    Persist {
        file: PathBuf,
        /// Also track toroidal classes of G_n across the steps.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Cross-check the strip images and the blow-up against G_n.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Longest strip to try.
        #[arg(long)]
        max_strips: Option<usize>,
    },
    /// Run every invariant check on a seeded random corpus.
    Sweep {
        /// Corpus configuration (JSON).
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = commands::run(&cli.command, &cli.global);
    match outcome {
        Ok(out) => {
            if !cli.global.quiet {
                match cli.global.format {
                    Format::Json => print!("{}", out.report.to_json()),
                    Format::Text => print!("{}", out.report.to_text()),
                }
            }
            for note in &out.notes {
                eprintln!("perihom: {note}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("perihom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
