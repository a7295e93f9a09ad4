use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sieve-knapsack",
    version,
    about = "Streaming submodular maximization under d-knapsack constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the one-pass solver and write a result record.
    Solve(SolveArgs),
    /// Compare the streaming solver with the baselines.
    Compare(CompareArgs),
    /// Vary one budget of a literature instance and emit plot data.
    Sweep(SweepArgs),
    /// Generate synthetic input files.
    Gen(GenArgs),
    /// Online and offline upper bounds for a feasible set.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Citation directory with edges.tsv, meta.tsv and config.json.
    #[arg(long)]
    pub citation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Budgets for a citation directory, overriding its config (recency,pagerank,refs).
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub budgets: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Return the first big element alone, as soon as it arrives.
    #[arg(long)]
    pub faithful_early_exit: bool,
    /// Read the stream twice, computing the exact grid anchor first.
    #[arg(long, conflicts_with = "delta")]
    pub two_pass: bool,
    /// Failure probability of the sampled two-pass scheme (decomposable objectives only).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Seed for the sample drawn under --delta.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Partial enumeration depth of the greedy baseline.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub enum_depth: u8,
    #[arg(long)]
    pub faithful_early_exit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    Recency,
    Pagerank,
    Refs,
}

impl Vary {
    pub fn row(self) -> usize {
        match self {
            Vary::Recency => 0,
            Vary::Pagerank => 1,
            Vary::Refs => 2,
        }
    }
}

/// `lo:hi:step` with `0 < lo ≤ hi` and `step > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl BudgetRange {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

impl FromStr for BudgetRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let range = BudgetRange {
            lo: parse(lo)?,
            hi: parse(hi)?,
            step: parse(step)?,
        };
        if !(range.lo > 0.0 && range.step > 0.0 && range.hi.is_finite()) {
            return Err("budgets and step must be positive".into());
        }
        if range.lo > range.hi {
            return Err(format!("empty range: {} > {}", range.lo, range.hi));
        }
        Ok(range)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Citation directory with edges.tsv, meta.tsv and config.json.
    #[arg(long)]
    pub citation: PathBuf,
    #[arg(long, value_enum)]
    pub vary: Vary,
    #[arg(long)]
    pub range: BudgetRange,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Fixed budgets for the other rows (recency,pagerank,refs); defaults to the config
    /// budgets, then to 20,10,20.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub budgets: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Instance,
    News,
    Citation,
    Exemplar,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of elements, articles or papers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of knapsack rows (instance only).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of features (news only).
    #[arg(long, default_value_t = 480)]
    pub features: usize,
    /// Word budget (news) or budget (exemplar).
    #[arg(long)]
    pub budget: Option<f64>,
    /// Number of source papers (citation only).
    #[arg(long, default_value_t = 5)]
    pub sources: usize,
    /// Output file, or directory for citation data.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Full,
    Residual,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated element ids; defaults to the streaming solution.
    #[arg(long, value_delimiter = ',')]
    pub set: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Variant::Full)]
    pub variant: Variant,
}
