//! Command-line front end: validate input files, decide prompt
//! representability, verify extension and chain theorems, and run packaged
//! demonstration scenarios. Verdict reports are JSON on standard output;
//! progress narration goes to standard error.

mod commands;
mod demos;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use report::{Format, Params, Report};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "fincat",
    version,
    about = "Finite-category checks: validation, representability, extensions, chains, demos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cap on enumerated component families per search.
    #[arg(long, global = true, default_value_t = fincat::DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,

    /// Seed recorded in reports and used by any generated content.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Report rendering on standard output.
    #[arg(long, global = true, value_enum, default_value_t = CliFormat::Json)]
    format: CliFormat,

    /// Numerical tolerance for spectral factorization.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check any supported file and report its kind and vital statistics.
    Validate {
        /// Path to a category, functor, task, chain, graph, mask, or lm file.
        path: PathBuf,
    },
    /// Decide whether a contravariant task is representable by a prompt.
    Prompt {
        /// Category file.
        category: PathBuf,
        /// Contravariant task file over the same category.
        task: PathBuf,
    },
    /// Extend a covariant task along the embedding and verify it solves
    /// the task at every object.
    Finetune {
        /// Category file.
        category: PathBuf,
        /// Covariant task file over the same category.
        task: PathBuf,
    },
    /// Verify structure preservation along a chain of full embeddings.
    Chain {
        /// Chain file.
        chain: PathBuf,
    },
    /// Run a packaged scenario end to end.
    Demo {
        #[arg(value_enum)]
        scenario: Scenario,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    /// Rotation groupoid: a 2-class task no prompt can represent.
    Rotation,
    /// Similarity triangle: category plus kernel feature factorization.
    Contrastive,
    /// Masked splits: bipartite category with lossless recovery.
    Masked,
    /// Two-token language model: exact successor distributions.
    Lm,
    /// Image-text analog: embedding with decoding outside the training set.
    ClipAnalog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut inputs = BTreeMap::new();

    let (command_name, (verdict, code)) = match &cli.command {
        Command::Validate { path } => {
            report::record_input(&mut inputs, "path", path);
            ("validate", commands::cmd_validate(path))
        }
        Command::Prompt { category, task } => {
            report::record_input(&mut inputs, "category", category);
            report::record_input(&mut inputs, "task", task);
            ("prompt", commands::cmd_prompt(category, task, cli.budget))
        }
        Command::Finetune { category, task } => {
            report::record_input(&mut inputs, "category", category);
            report::record_input(&mut inputs, "task", task);
            ("finetune", commands::cmd_finetune(category, task))
        }
        Command::Chain { chain } => {
            report::record_input(&mut inputs, "chain", chain);
            ("chain", commands::cmd_chain(chain, cli.budget))
        }
        Command::Demo { scenario } => match scenario {
            Scenario::Rotation => ("demo rotation", demos::demo_rotation(cli.budget)),
            Scenario::Contrastive => ("demo contrastive", demos::demo_contrastive(cli.tolerance)),
            Scenario::Masked => ("demo masked", demos::demo_masked()),
            Scenario::Lm => ("demo lm", demos::demo_lm()),
            Scenario::ClipAnalog => ("demo clip-analog", demos::demo_clip_analog(cli.budget)),
        },
    };

    let report = Report {
        command: command_name.to_string(),
        inputs,
        params: Params {
            budget: cli.budget,
            seed: cli.seed,
            tolerance: cli.tolerance,
        },
        verdict,
        timing_ms: started.elapsed().as_millis(),
    };
    let format = match cli.format {
        CliFormat::Json => Format::Json,
        CliFormat::Text => Format::Text,
    };
    print!("{}", report::render(&report, format));
    ExitCode::from(code)
}
