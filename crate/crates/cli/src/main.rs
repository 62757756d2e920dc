mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{exit, CliError};

#[derive(Parser, Debug)]
#[command(name = "cube-ramsey", version, about = "Colorings and copy search for Boolean lattice Ramsey lower bounds")]
struct Cli {
    /// Worker threads (default: available parallelism; 1 = sequential reference run)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print nothing; only the exit status carries the result
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    C0,
    Layered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColorChoice {
    Red,
    Blue,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a coloring file
    Color {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "c0")]
        scheme: Scheme,
        /// Ground set size (c0: must be 2n; layered: default 2n-1)
        #[arg(long)]
        m: Option<u32>,
        /// Destination file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the Red class and the dual Red class are restrictive
    Check {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Search color classes for a copy of 2^[n]
    FindCopy {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        color: ColorChoice,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Certify R(Q_n, Q_n) > 2n for one n
    VerifyLowerBound {
        #[arg(long)]
        n: u32,
        /// Coloring of 2^[2n] to use instead of c0 (required below n = 4)
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Exhaustive Ramsey value for tiny cubes
    BruteRamsey {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_m: u32,
        /// Test one coloring per orbit of ground permutations and color swap
        #[arg(long)]
        symmetry_reduction: bool,
    },
    /// Build the flip graph on transversals and check its bipartition
    FlipGraph {
        #[arg(long)]
        n: u32,
        /// Write the edge list here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify every embedding certificate in a report
    Recheck {
        /// Report produced by find-copy or verify-lower-bound
        report: PathBuf,
        /// Coloring file (needed when the report did not generate its coloring)
        #[arg(long)]
        coloring: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(exit::SOFTWARE);
        }
    };
    let result = pool.install(|| commands::run(&cli.command, threads));
    match result {
        Ok(outcome) => {
            if !cli.quiet {
                if let Some(text) = outcome.stdout {
                    print!("{text}");
                }
            }
            ExitCode::from(outcome.code)
        }
        Err(CliError { message, code }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
