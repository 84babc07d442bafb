use std::path::PathBuf;
use std::process::ExitCode;

use chordal::search::SearchBudget;
use chordal_cli::*;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chordal", version, about = "Crossing indices, move search and axiom checks on Gauss diagrams")]
struct Cli {
    /// Catalog file of `name = code` lines; the built-in catalog otherwise.
    #[arg(long, global = true, env = "CHORDAL_CATALOG")]
    catalog: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args, Clone)]
struct Budget {
    #[arg(long, default_value_t = 10)]
    budget_depth: usize,
    #[arg(long, default_value_t = 8)]
    budget_crossings: usize,
    /// Stop after this many search states.
    #[arg(long, default_value_t = SearchBudget::DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Only visit genus-0 diagrams.
    #[arg(long)]
    planar: bool,
}

impl Budget {
    fn get(&self) -> SearchBudget {
        SearchBudget { max_crossings: self.budget_crossings, max_depth: self.budget_depth, planar: self.planar, max_states: Some(self.max_states) }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog.
    List,
    /// Index report for catalog entries or inline Gauss codes.
    Compute {
        /// Entry name or inline code; repeatable. All entries when omitted.
        #[arg(long)]
        knot: Vec<String>,
        /// Index name or `all`; repeatable.
        #[arg(long)]
        index: Vec<String>,
        /// Same as `--index all`.
        #[arg(long)]
        all: bool,
        /// Biquandle table file: size, then the ∘ table, then the ∗ table.
        #[arg(long)]
        biquandle: Option<PathBuf>,
    },
    /// Random-walk check of the index axioms and invariants.
    Fuzz {
        #[arg(long)]
        knot: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Crossing cap of the walk.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        /// Add an index with a wrong involution, to see a violation reported.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Search for moves carrying one crossing onto another.
    Substitute {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Certify wrapping reductions by search.
    Wrapcheck {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        crossing: usize,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Second-move partner of the crossing, to certify the wrapping swap.
        #[arg(long)]
        swap_with: Option<usize>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Reduce a based matrix to its primitive form.
    Reduce {
        /// JSON based matrix file (labels, b, d, eps, grading).
        #[arg(long, conflicts_with = "knot")]
        matrix: Option<PathBuf>,
        #[arg(long, required_unless_present = "matrix")]
        knot: Option<String>,
        /// Marked crossing, which becomes d.
        #[arg(long)]
        crossing: Option<usize>,
        #[arg(long)]
        graded: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let catalog = load_catalog(cli.catalog.as_deref())?;
    match cli.command {
        Command::List => Ok(cmd_list(&catalog)),
        Command::Compute { knot, mut index, all, biquandle } => {
            if all {
                index.push("all".into());
            }
            let b = biquandle.as_ref().map(load_biquandle).transpose()?;
            cmd_compute(&catalog, &knot, &index, b.as_ref())
        }
        Command::Fuzz { knot, steps, seed, cap, inject_fault } => cmd_fuzz(&catalog, &knot, &FuzzOptions { steps, seed, cap, inject_fault }),
        Command::Substitute { knot, from, to, budget } => cmd_substitute(&catalog, &knot, from, to, budget.get()),
        Command::Wrapcheck { knot, crossing, n, swap_with, budget } => cmd_wrapcheck(&catalog, &knot, crossing, n, swap_with, budget.get()),
        Command::Reduce { matrix, knot, crossing, graded } => {
            let source = match (&matrix, &knot) {
                (Some(p), _) => MatrixSource::File(p),
                (None, Some(k)) => MatrixSource::Knot { knot: k, crossing, graded },
                (None, None) => unreachable!("clap requires one of them"),
            };
            cmd_reduce(&catalog, source)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = (cli.format, cli.out.clone());
    let result = run(cli);
    let code = exit_code(&result);
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(code);
        }
    };
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&report.json).unwrap() + "\n",
        Format::Text => report.text,
    };
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, body) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(code)
}
