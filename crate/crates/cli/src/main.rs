mod commands;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use selfsim::Error;

use crate::commands::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// List the states of a group or of one of its elements.
    States,
    /// Apply an element to a word.
    Eval,
    /// self-similar | finite-state | persistent | coarsely-diagonal
    Check,
    /// Extend a group to a persistent action on one more letter.
    Persist,
    /// Compile an affine group to automaton definitions.
    CompileAgl,
    /// mul | inv | eq | expand | retract | abelianize on tree-pair elements.
    Rover,
    /// Build the complex X_k: `complex <k> <d> [group]`.
    Complex,
    /// DOT graph of a group's states.
    Dot,
    /// Seeded property report over the built-in fixtures.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Self-similar groups, affine automata and Röver–Nekrashevych groups")]
pub struct Cli {
    /// TOML definitions file.
    #[arg(long)]
    pub defs: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub cmd: Command,
    #[arg(long, value_enum, default_value = "text")]
    pub out: Format,
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_order: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Command arguments.
    pub args: Vec<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Parse(_) | Error::InvalidInput(_) | Error::InvalidContext(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Outcome { output, holds }) => {
            print!("{output}");
            if holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
