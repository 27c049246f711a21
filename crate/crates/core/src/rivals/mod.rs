//! Comparison methods, each producing a weak ranking of all candidates.
//!
//! Minimax, ranked pairs and Schulze work from the margin matrix and are
//! Condorcet consistent. Instant runoff and convergence voting need the
//! ballots themselves.
//!
//! Wherever a method must order equal values, it falls back to candidate id
//! order and says so in its trace.

mod cv;
mod irv;
mod minimax;
mod ranked_pairs;
mod schulze;

use serde::{Deserialize, Serialize};

pub use cv::{convergence_voting, pairwise_votes, CvTrace, CV_DEFAULT_DAMPING};
pub use irv::{irv, IrvRound, IrvTrace};
pub use minimax::{minimax, MinimaxTrace};
pub use ranked_pairs::{ranked_pairs, PairDecision, RankedPairsTrace};
pub use schulze::{schulze, strongest_paths, SchulzeTrace};

use crate::error::{Error, Result};
use crate::margins::TransitionKind;
use crate::rank::{
    ballotrank_with_epsilon, DampingConfig, Election, ScoreVector, WeakRanking, DEFAULT_DAMPING,
    DEFAULT_MAX_ITERATIONS, DEFAULT_TIE_EPSILON, DEFAULT_TOLERANCE,
};
use crate::CandidateId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    BallotRank,
    Minimax,
    RankedPairs,
    Schulze,
    Irv,
    Cv,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::BallotRank, Method::Minimax, Method::RankedPairs, Method::Schulze, Method::Irv, Method::Cv];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::BallotRank => "ballotrank",
            Method::Minimax => "minimax",
            Method::RankedPairs => "rankedpairs",
            Method::Schulze => "schulze",
            Method::Irv => "irv",
            Method::Cv => "cv",
        }
    }

    /// Whether the method has a damping parameter.
    pub fn is_damped(self) -> bool {
        matches!(self, Method::BallotRank | Method::Cv)
    }

    /// Whether the method works from ballots rather than margins.
    pub fn needs_ballots(self) -> bool {
        matches!(self, Method::Irv | Method::Cv)
    }

    pub fn default_damping(self) -> Option<f64> {
        match self {
            Method::BallotRank => Some(DEFAULT_DAMPING),
            Method::Cv => Some(CV_DEFAULT_DAMPING),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Per-candidate values behind a method's ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum MethodScores {
    Stationary(ScoreVector),
    /// Largest margin of defeat; 0 when undefeated.
    WorstDefeat(Vec<u64>),
    /// Number of opponents beaten on strongest paths.
    BeatpathWins(Vec<usize>),
    /// Round in which each candidate was eliminated; `None` for the survivor.
    EliminationRound(Vec<Option<usize>>),
    /// Ranked pairs has no per-candidate score.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallotRankTrace {
    pub variant: TransitionKind,
    pub direct_gap: Option<f64>,
    pub degenerate: bool,
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum MethodTrace {
    BallotRank(BallotRankTrace),
    Minimax(MinimaxTrace),
    RankedPairs(RankedPairsTrace),
    Schulze(SchulzeTrace),
    Irv(IrvTrace),
    Cv(CvTrace),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub ranking: WeakRanking,
    pub scores: MethodScores,
    pub trace: MethodTrace,
    /// The ranking made total by candidate id inside each tie group.
    pub tiebreak_order: Vec<CandidateId>,
}

impl MethodResult {
    pub(crate) fn new(method: Method, ranking: WeakRanking, scores: MethodScores, trace: MethodTrace) -> Self {
        let tiebreak_order = ranking
            .groups
            .iter()
            .flat_map(|g| {
                let mut g = g.clone();
                g.sort_unstable();
                g
            })
            .collect();
        MethodResult { method, ranking, scores, trace, tiebreak_order }
    }

    pub fn winners(&self) -> &[CandidateId] {
        self.ranking.winners()
    }

    /// Solver diagnostics for the stationary-distribution methods.
    pub fn score_vector(&self) -> Option<&ScoreVector> {
        match &self.scores {
            MethodScores::Stationary(s) => Some(s),
            _ => None,
        }
    }
}

/// Settings shared by [`run`]. `damping: None` picks each method's default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub damping: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub variant: TransitionKind,
    pub tie_epsilon: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            damping: None,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            variant: TransitionKind::SelfLoops,
            tie_epsilon: DEFAULT_TIE_EPSILON,
        }
    }
}

impl RunOptions {
    /// Damping configuration for `method`, or `None` if it is undamped.
    pub fn config_for(&self, method: Method) -> Option<DampingConfig> {
        method.default_damping().map(|default| DampingConfig {
            d: self.damping.unwrap_or(default),
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        })
    }
}

/// Runs any method on an election.
pub fn run(method: Method, election: &Election, opts: &RunOptions) -> Result<MethodResult> {
    let ballots = || election.profile().ok_or(Error::NeedsBallots(method.as_str()));
    match method {
        Method::BallotRank => {
            let cfg = opts.config_for(method).expect("ballotrank is damped");
            let out = ballotrank_with_epsilon(election, &cfg, opts.variant, opts.tie_epsilon)?;
            let trace = MethodTrace::BallotRank(BallotRankTrace {
                variant: out.variant,
                direct_gap: out.direct_gap,
                degenerate: out.degenerate,
                connected: out.connected,
            });
            Ok(MethodResult::new(method, out.ranking, MethodScores::Stationary(out.scores), trace))
        }
        Method::Minimax => Ok(minimax(&election.margins())),
        Method::RankedPairs => Ok(ranked_pairs(&election.margins())),
        Method::Schulze => Ok(schulze(&election.margins())),
        Method::Irv => irv(ballots()?),
        Method::Cv => {
            let cfg = opts.config_for(method).expect("cv is damped");
            convergence_voting(ballots()?, &cfg, opts.tie_epsilon)
        }
    }
}
