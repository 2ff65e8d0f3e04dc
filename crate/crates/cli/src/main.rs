//! `tressec`: validate, convert and check separation-system documents.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::input::Failure;

#[derive(Parser)]
#[command(
    name = "tressec",
    version,
    about = "Tree sets, trees, order trees, bipartitions and S-trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of a document and report each one.
    Validate {
        /// Envelope file, or `-` for stdin.
        file: String,
    },
    /// Convert a document into another representation.
    Convert {
        file: String,
        #[arg(long, value_enum)]
        to: Target,
        /// JSON list of element labels or indices forming an orientation.
        #[arg(long)]
        orientation: Option<String>,
    },
    /// Run a round-trip verification on a document.
    Roundtrip {
        file: String,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        orientation: Option<String>,
    },
    /// Prune, tighten and essentialize an S-tree.
    Canonicalize { file: String },
    /// Print a random document.
    Generate {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Target {
    Tree,
    System,
    OrderTree,
    Bipartitions,
    BipartitionsSparse,
    Decomposition,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Theorem {
    TreesI,
    TreesIi,
    OrderI,
    OrderIi,
    Bipartitions,
    Sparse,
    Stree,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GenKind {
    System,
    Tree,
    OrderTree,
    Stree,
    Graph,
    TreeDecomposition,
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Validate { file } => commands::validate(&input::read(&file)?),
        Command::Convert { file, to, orientation } => {
            commands::convert(&input::read(&file)?, to, orientation.as_deref())
        }
        Command::Roundtrip { file, theorem, orientation } => {
            commands::roundtrip(&input::read(&file)?, theorem, orientation.as_deref())
        }
        Command::Canonicalize { file } => commands::canonicalize(&input::read(&file)?),
        Command::Generate { kind, seed, max_size } => commands::generate(kind, seed, max_size),
    }
}

fn print(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(value) => {
            print(&value);
            ExitCode::SUCCESS
        }
        Err(Failure::Domain { message, report }) => {
            if let Some(report) = report {
                print(&report);
            }
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
