use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;

/// Graded modal logic, counting automata and color refinement on finite Kripke models.
#[derive(Debug, Parser)]
#[command(name = "gradedwl", version, about)]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model-check a formula at a node.
    Check {
        model: PathBuf,
        #[arg(long)]
        point: u32,
        formula: String,
    },
    /// Print the type of a pointed model.
    Type {
        model: PathBuf,
        #[arg(long)]
        point: u32,
        #[arg(long)]
        depth: usize,
        /// Per-level counting bounds, outermost first: `k1,k2;k1,k2`. Default: the full type.
        #[arg(long)]
        width: Option<String>,
        /// Also print the type as a formula.
        #[arg(long)]
        render: bool,
    },
    /// Color refinement.
    Refine {
        model: PathBuf,
        #[arg(long, conflicts_with = "stable")]
        rounds: Option<usize>,
        /// Refine until the partition is stable (the default).
        #[arg(long)]
        stable: bool,
        /// Print every round, not only the last.
        #[arg(long)]
        trace: bool,
        /// Close every relation under inversion first.
        #[arg(long)]
        symmetric: bool,
        /// Require a single irreflexive symmetric relation and no propositions.
        #[arg(long)]
        classic: bool,
    },
    /// Decide whether two pointed models are refinement-equivalent.
    Distinguish {
        model_a: PathBuf,
        point_a: u32,
        model_b: PathBuf,
        point_b: u32,
        #[arg(long, value_enum, default_value_t = Oracle::Wl)]
        oracle: Oracle,
        /// Extract and verify a separating formula.
        #[arg(long)]
        formula: bool,
    },
    /// Run an automaton on a pointed model.
    Run {
        automaton: PathBuf,
        model: PathBuf,
        #[arg(long)]
        point: u32,
        #[arg(long, default_value_t = 10)]
        max_rounds: usize,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Translate between formulas and type automata.
    #[command(subcommand)]
    Translate(Translate),
    /// Compare a formula, its automaton and the disjunction read back from it on a grid.
    Roundtrip {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        vocab: VocabArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Generate a grid of model documents.
    Grid {
        #[command(flatten)]
        vocab: VocabArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        /// Write one file per model into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Translate {
    /// Formulas to a type automaton document.
    F2a {
        /// Repeat for a disjunction.
        #[arg(long = "formula", required = true)]
        formulas: Vec<String>,
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long)]
        max_items: Option<usize>,
    },
    /// An automaton document to full types, one per line.
    A2f {
        automaton: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Wl,
    Gfp,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct VocabArgs {
    /// Number of propositions, named p0, p1, ….
    #[arg(long, default_value_t = 0)]
    pub props: u32,
    #[arg(long, default_value_t = 1)]
    pub channels: u32,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 3)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random models to draw; without it the grid is exhaustive.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 2)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub max_degree: usize,
    /// Defaults to the depth budget.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    #[arg(long)]
    pub max_items: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::execute(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("reports serialize"));
            } else {
                print!("{}", out.text);
            }
            if let Some(note) = out.note {
                eprintln!("{note}");
            }
            out.status.into()
        }
        Err(e) => {
            if cli.json {
                let report = serde_json::json!({ "error": e.to_string(), "exit": e.status() as u8 });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            }
            eprintln!("error: {e}");
            e.status().into()
        }
    }
}
