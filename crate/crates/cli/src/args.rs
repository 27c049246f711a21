use std::path::PathBuf;

use ballotrank::criteria::Criterion;
use ballotrank::margins::TransitionKind;
use ballotrank::rivals::Method;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable consulted for the damping factor when `--damping` is
/// not given.
pub const DAMPING_ENV: &str = "BALLOTRANK_DAMPING";

#[derive(Debug, Parser)]
#[command(name = "ballotrank", version, about = "Tabulate ranked-ballot elections with BallotRank and rival methods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method on one election
    Tabulate(TabulateArgs),
    /// Run several methods and report whether their winners agree
    Compare(CompareArgs),
    /// Run BallotRank across a grid of damping values
    Sweep(SweepArgs),
    /// Replay counterexamples or fuzz social-choice criteria
    Criteria(CriteriaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Ballot file (`candidates:` header, then `k: a > b > c` lines)
    Ballots,
    /// Square CSV of pairwise margins
    Margins,
}

impl InputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::Ballots => "ballots",
            InputFormat::Margins => "margins",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ballotrank,
    Minimax,
    Rankedpairs,
    Schulze,
    Irv,
    Cv,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Ballotrank => Method::BallotRank,
            MethodArg::Minimax => Method::Minimax,
            MethodArg::Rankedpairs => Method::RankedPairs,
            MethodArg::Schulze => Method::Schulze,
            MethodArg::Irv => Method::Irv,
            MethodArg::Cv => Method::Cv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Selfloops,
    Noselfloops,
    Unweighted,
}

impl From<VariantArg> for TransitionKind {
    fn from(v: VariantArg) -> TransitionKind {
        match v {
            VariantArg::Selfloops => TransitionKind::SelfLoops,
            VariantArg::Noselfloops => TransitionKind::NoSelfLoops,
            VariantArg::Unweighted => TransitionKind::Unweighted,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Election file
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted (.csv is margins)
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Damping factor in (0, 1]; defaults to $BALLOTRANK_DAMPING, then 0.85
    /// (1 for convergence voting)
    #[arg(long)]
    pub damping: Option<f64>,
    /// Transition matrix construction for BallotRank
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// L1 convergence tolerance of the power method
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Iteration cap of the power method
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TabulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "ballotrank")]
    pub method: MethodArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Write the BallotRank transition graph in Graphviz DOT format
    #[arg(long = "emit-graph", value_name = "FILE")]
    pub emit_graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated methods to compare
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ballotrank,minimax,rankedpairs,schulze")]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "d-min", default_value_t = 0.05)]
    pub d_min: f64,
    #[arg(long = "d-max", default_value_t = 1.0)]
    pub d_max: f64,
    #[arg(long = "d-step", default_value_t = 0.05)]
    pub d_step: f64,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Replay the five counterexample fixtures
    Fixtures,
    /// Fuzz the six positive criteria on random profiles
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct CriteriaArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Random profiles per criterion
    #[arg(long, default_value_t = 300)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "ballotrank")]
    pub method: MethodArg,
    /// Damping for every criterion; by default majority and Smith run at 1
    #[arg(long)]
    pub damping: Option<f64>,
    /// Restrict to these criteria (comma-separated)
    #[arg(long, value_delimiter = ',', value_parser = parse_criterion)]
    pub only: Vec<Criterion>,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse()
}
