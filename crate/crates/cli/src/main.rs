//! `permup`: run While programs under an information-flow monitor, compare
//! runs, and execute the noninterference and lemma suites.
//!
//! Exit status: 0 completed / clean, 1 usage or input error, 2 halted,
//! 3 out of fuel, 4 violations or mismatches found.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permup::monitor::DEFAULT_FUEL;
use permup::Strategy;

#[derive(Debug, Parser)]
#[command(
    name = "permup",
    version,
    about = "Dynamic information-flow monitor for a small While language"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a program from an initial store and print the final store.
    Run(RunArgs),
    /// Run a program from two stores and compare the runs.
    Compare(CompareArgs),
    /// Run one of the checking suites.
    Check {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Inspect or replay the bundled examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Tsv,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Built-in lattice (two_point, chain3, fig5, powerset(n)) or a lattice file.
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long, default_value = "pua", value_parser = parse_strategy)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    /// Required to run pua_unsound.
    #[arg(long)]
    pub allow_unsound: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub program: PathBuf,
    #[command(flatten)]
    pub monitor: MonitorArgs,
    /// Initial store file; omitted means the empty store.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Print every assignment and branch.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub program: PathBuf,
    #[command(flatten)]
    pub monitor: MonitorArgs,
    /// The two initial stores.
    #[arg(long, num_args = 1, required = true)]
    pub store: Vec<PathBuf>,
    /// Observer: a lattice element, or a principal index for pup. Defaults
    /// to the bottom element (principal 0).
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Program files; omitted means every bundled example (or random
    /// programs with --random).
    pub programs: Vec<PathBuf>,
    /// Lattice for program files. Bundled examples use their own.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Strategy to check; omitted means every sound strategy.
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<Strategy>,
    /// Check a single observer instead of all of them.
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pair spaces larger than this are sampled (tini), or the number of
    /// pairs per cell (lemmas).
    #[arg(long)]
    pub max_pairs: Option<u64>,
    /// Sampled pairs per cell when a pair space exceeds --max-pairs.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Check this many random programs generated from --seed.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long)]
    pub allow_unsound: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
enum Suite {
    /// Termination-insensitive noninterference over equivalent store pairs.
    Tini(SuiteArgs),
    /// Per-derivation lemmas, the expression lemma and confinement.
    Lemmas(SuiteArgs),
    /// Label-pair transitions of the appendix programs.
    Transitions {
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Algebraic laws of one lattice, or of every built-in one.
    LatticeLaws {
        #[arg(long)]
        lattice: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusAction {
    /// List fixtures and their expected outcomes.
    List,
    /// Check a fixture's expectations (or every fixture's, with no name).
    Replay { names: Vec<String> },
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: permup::monitor::UnknownStrategy| e.to_string())
}

/// Exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Error = 1,
    Halted = 2,
    Fuel = 3,
    Violations = 4,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Exit::Error as u8
            } else {
                Exit::Ok as u8
            });
        }
    };
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Check { suite } => match suite {
            Suite::Tini(args) => commands::check_tini(&args),
            Suite::Lemmas(args) => commands::check_lemmas(&args),
            Suite::Transitions { format } => commands::check_transitions(format),
            Suite::LatticeLaws { lattice } => commands::check_lattice_laws(lattice.as_deref()),
        },
        Command::Corpus { action } => match action {
            CorpusAction::List => commands::corpus_list(),
            CorpusAction::Replay { names } => commands::corpus_replay(&names),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Error as u8)
        }
    }
}
