//! `qdouble`: run the checkers on structure files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Failure, Outcome, Status};

#[derive(Parser)]
#[command(name = "qdouble", version, about = "Exact checkers for double and multiple Lie algebroids")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Report products of odd generators whose normal form carries a sign.
    #[arg(long, global = true)]
    warn_reorder: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a file and summarize its chart, transition and fields.
    ParseCheck { file: PathBuf },
    /// Check that fields are odd and square to zero.
    CheckQ2 {
        file: PathBuf,
        /// Fields to check (default: all).
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Read the anchor and bracket off a field on a one-direction chart.
    DeriveBrackets {
        file: PathBuf,
        #[arg(long)]
        field: Option<String>,
    },
    /// Reverse the parity of one direction; emits a new file.
    ReverseParity {
        file: PathBuf,
        #[arg(long)]
        direction: Option<usize>,
        /// Fields to carry along (default: all).
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Dualize a double chart along one side; emits a new file.
    Dualize {
        file: PathBuf,
        #[arg(long)]
        direction: Option<usize>,
        /// Fields to carry along (default: all).
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Check a pair Q1, Q2 on the doubly reversed chart for commutativity.
    #[command(visible_alias = "check-commutativity")]
    CheckDouble {
        file: PathBuf,
        #[arg(long)]
        q1: Option<String>,
        #[arg(long)]
        q2: Option<String>,
        /// Also run conditions I, II, III and require agreement.
        #[arg(long)]
        all: bool,
    },
    /// Check that the fields of an n-fold structure pairwise commute.
    CheckNfold {
        file: PathBuf,
        /// Comma-separated field names, one per direction.
        #[arg(long, value_delimiter = ',')]
        fields: Vec<String>,
    },
    /// Build the cotangent double of a bialgebroid; emits a new file.
    BuildDouble {
        file: PathBuf,
        #[arg(long)]
        e: Option<String>,
        #[arg(long)]
        e_star: Option<String>,
    },
    /// The neighbor graph of an n-fold vector bundle.
    Neighbors {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, cli.warn_reorder) {
        Ok(Outcome { report, status }) => {
            let text = match cli.format {
                Format::Text => report.to_text(),
                Format::Structured => report.to_json(),
            };
            if let Err(e) = emit(cli.out.as_ref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(match status {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Disagree => 3,
            })
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
