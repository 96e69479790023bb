use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ggs_core::{Budget, Ggs, PrimeContext, DEFAULT_DEGREE_CAP};

mod commands;
mod grid;

/// Exact computation in GGS-groups on the p-regular rooted tree.
#[derive(Parser)]
#[command(name = "ggs", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Quotient cache directory.
    #[arg(long, global = true, env = "GGS_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Distinct words a word-problem closure may visit.
    #[arg(long, global = true, default_value_t = Budget::default().closure_cap)]
    pub budget_closure: usize,

    /// Longest intermediate word, in syllables.
    #[arg(long, global = true, default_value_t = Budget::default().word_len_cap)]
    pub budget_word_len: usize,

    /// Longest power/section chain in order computations.
    #[arg(long, global = true, default_value_t = Budget::default().depth_cap)]
    pub budget_depth: usize,

    /// Largest permutation degree a quotient may have.
    #[arg(long, global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    pub budget_degree: usize,

    /// Deepest tree level any computation may touch.
    #[arg(long, global = true, default_value_t = PrimeContext::DEFAULT_DEPTH_CAP)]
    pub depth_cap: usize,
}

impl GlobalArgs {
    pub fn budget(&self) -> Budget {
        Budget {
            closure_cap: self.budget_closure,
            word_len_cap: self.budget_word_len,
            depth_cap: self.budget_depth,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args)]
pub struct GroupArgs {
    /// Odd prime.
    #[arg(short)]
    pub p: u32,

    /// Defining vector: p - 1 comma-separated residues mod p.
    #[arg(short, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub e: Vec<i64>,
}

impl GroupArgs {
    pub fn ggs(&self, depth_cap: usize) -> ggs_core::Result<Ggs> {
        Ggs::with_depth_cap(self.p, &self.e, depth_cap)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a defining vector and run the TF test.
    Classify {
        #[command(flatten)]
        group: GroupArgs,
        /// Largest prime for the exhaustive TF enumeration.
        #[arg(long, default_value_t = ggs_core::vector::TF_BRUTE_FORCE_BOUND)]
        tf_bound: u32,
    },
    /// Orders, indices, kernels and invariants of a congruence quotient.
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
        /// Quotient level n.
        #[arg(long)]
        level: usize,
        /// Quantities to report (defaults to all but `k`).
        #[arg(long, value_enum, value_delimiter = ',')]
        what: Vec<commands::Quantity>,
    },
    /// Run the verification suite.
    Verify {
        /// Entries `p:e[:level]` separated by `;`; empty for no entries.
        #[arg(long)]
        grid: Option<String>,
        /// Checks to run, comma-separated (default all).
        #[arg(long, value_delimiter = ',', value_parser = commands::parse_check)]
        checks: Vec<ggs_core::verify::CheckId>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampled words per C8 run (default 200 for p = 3, 50 otherwise).
        #[arg(long)]
        samples: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<commands::FaultArg>,
    },
    /// Order of a word.
    Order {
        #[command(flatten)]
        group: GroupArgs,
        /// Word, e.g. `b*a^-1`, `[b,a]`, `y_0^a`.
        word: String,
    },
    /// Portrait of a word, as DOT (text format) or JSON.
    Portrait {
        #[command(flatten)]
        group: GroupArgs,
        word: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Print the JSON schema of verification reports.
    Schema,
    /// Manage the quotient cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Remove all cached quotients.
    Purge,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Classify { group, tf_bound } => commands::classify(g, group, *tf_bound),
        Command::Quotient { group, level, what } => commands::quotient(g, group, *level, what),
        Command::Verify {
            grid,
            checks,
            seed,
            samples,
            output,
            inject_fault,
        } => commands::verify(
            g,
            commands::VerifyArgs {
                grid: grid.as_deref(),
                checks,
                seed: *seed,
                samples: *samples,
                output: output.as_deref(),
                fault: *inject_fault,
            },
        ),
        Command::Order { group, word } => commands::order(g, group, word),
        Command::Portrait { group, word, depth } => commands::portrait(g, group, word, *depth),
        Command::Schema => commands::schema(),
        Command::Cache {
            action: CacheAction::Purge,
        } => commands::purge(g),
    };
    match result {
        Ok(code) => code.into(),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code.into()
        }
    }
}
