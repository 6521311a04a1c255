//! `ragcheck` command-line driver: judge datasets, compute metric reports,
//! correlate metrics with human preferences, and validate dataset files.
//!
//! Every command writes human-facing text to `out`, diagnostics to `err`, and
//! returns an [`Exit`] status:
//!
//! | status | meaning |
//! |--------|---------|
//! | 0 | success |
//! | 1 | partial or semantic failure (some instances failed, violations found, no valid pairs) |
//! | 2 | input or usage failure (unreadable file, malformed line, bad config) |

pub mod commands;
pub mod config;
pub mod io;
pub mod render;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Partial = 1,
    Input = 2,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(
    name = "ragcheck",
    version,
    about = "Claim-level evaluation of RAG outputs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract claims and entailment judgments for every dataset instance.
    Judge {
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        parallelism: Option<usize>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Compute per-query metrics and the dataset aggregate from judgments.
    Eval {
        judgments: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Supplies the retrieval metadata copied into the aggregate record.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Correlate metric differences with human preference labels.
    Correlate {
        pairs: PathBuf,
        #[arg(long = "metric")]
        metrics: Vec<String>,
        #[arg(long = "aspect")]
        aspects: Vec<String>,
    },
    /// Check a dataset file for schema problems.
    Validate { dataset: PathBuf },
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let result = match cli.command {
        Command::Judge {
            dataset,
            config,
            output,
            parallelism,
            cache_dir,
        } => commands::judge::run(
            &commands::judge::JudgeArgs {
                dataset,
                config,
                output,
                parallelism,
                cache_dir,
            },
            out,
            err,
        ),
        Command::Eval {
            judgments,
            output,
            format,
            config,
        } => commands::eval::run(
            &judgments,
            output.as_deref(),
            format,
            config.as_deref(),
            out,
            err,
        ),
        Command::Correlate {
            pairs,
            metrics,
            aspects,
        } => commands::correlate::run(&pairs, &metrics, &aspects, out, err),
        Command::Validate { dataset } => commands::validate::run(&dataset, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e:#}");
        Exit::Input
    })
}
