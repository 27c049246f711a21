//! Social-choice criteria as executable checks.
//!
//! Criteria BallotRank satisfies are fuzzed on random impartial-culture
//! profiles with [`check_positive`]. Criteria it fails are demonstrated by
//! replaying fixed counterexample pairs with [`replay_counterexample`].
//!
//! Non-dictatorship is not fuzzed separately: it follows from anonymity, since
//! a dictator's ballot could be swapped with anyone else's.

mod positive;
mod replay;
mod transform;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use positive::{check_positive, CheckConfig, TrialShape};
pub use replay::replay_counterexample;
pub use transform::{same_electorate, ProfileTransform};

use crate::profile::{Ballot, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Anonymity,
    Neutrality,
    Majority,
    CondorcetLoser,
    Pareto,
    Smith,
    Iia,
    Monotonicity,
    LaterNoHarm,
    NoShow,
    Cloning,
}

impl Criterion {
    /// Checked on random profiles.
    pub const POSITIVE: [Criterion; 6] = [
        Criterion::Anonymity,
        Criterion::Neutrality,
        Criterion::Majority,
        Criterion::CondorcetLoser,
        Criterion::Pareto,
        Criterion::Smith,
    ];

    /// Demonstrated by a fixed counterexample.
    pub const REPLAY: [Criterion; 5] =
        [Criterion::Iia, Criterion::Monotonicity, Criterion::LaterNoHarm, Criterion::NoShow, Criterion::Cloning];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Anonymity => "anonymity",
            Criterion::Neutrality => "neutrality",
            Criterion::Majority => "majority",
            Criterion::CondorcetLoser => "condorcet_loser",
            Criterion::Pareto => "pareto",
            Criterion::Smith => "smith",
            Criterion::Iia => "iia",
            Criterion::Monotonicity => "monotonicity",
            Criterion::LaterNoHarm => "later_no_harm",
            Criterion::NoShow => "no_show",
            Criterion::Cloning => "cloning",
        }
    }

    pub fn is_positive(self) -> bool {
        Criterion::POSITIVE.contains(&self)
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Criterion::POSITIVE
            .into_iter()
            .chain(Criterion::REPLAY)
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown criterion {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSample,
    CounterexampleFound,
    FixtureReproduced,
    FixtureMismatch,
}

/// One side of a witness: a profile and what the method made of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSide {
    /// The profile in ballot file format.
    pub profile: String,
    pub damping: Option<f64>,
    /// Stationary scores, when the method has them.
    pub scores: Option<Vec<f64>>,
    pub ranking: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub before: WitnessSide,
    /// Absent for criteria stated on a single profile.
    pub after: Option<WitnessSide>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub criterion: Criterion,
    pub verdict: Verdict,
    /// Present exactly when the verdict is `counterexample_found` or
    /// `fixture_reproduced`.
    pub witness: Option<Witness>,
    /// Random trials run; zero for replays.
    pub trials: usize,
    pub violations: usize,
    /// Violations are counted, not treated as failures, because the property
    /// is only guaranteed at `d = 1`.
    pub report_only: bool,
    pub method: String,
    pub damping: Option<f64>,
    pub seed: Option<u64>,
    /// Expected-versus-actual lines for a fixture mismatch.
    pub diff: Vec<String>,
}

impl CriterionOutcome {
    /// True unless a guaranteed property was violated or a fixture failed to
    /// reproduce.
    pub fn is_ok(&self) -> bool {
        match self.verdict {
            Verdict::HoldsOnSample | Verdict::FixtureReproduced => true,
            Verdict::CounterexampleFound => self.report_only,
            Verdict::FixtureMismatch => false,
        }
    }
}

/// Default candidate names: `a` through `z`, then `c26`, `c27`, ….
pub fn candidate_names(n: usize) -> Vec<String> {
    (0..n).map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("c{i}") }).collect()
}

/// Impartial culture: `n_voters` independent uniformly random complete
/// rankings, one ballot entry each.
///
/// # Panics
///
/// If either count is zero.
pub fn random_profile(n_candidates: usize, n_voters: usize, seed: u64) -> Profile {
    assert!(n_candidates >= 1 && n_voters >= 1, "need at least one candidate and one voter");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ballots = (0..n_voters)
        .map(|_| {
            let mut ranking: Vec<usize> = (0..n_candidates).collect();
            ranking.shuffle(&mut rng);
            Ballot::new(ranking, 1)
        })
        .collect();
    Profile::new(&candidate_names(n_candidates), ballots).expect("random profile is valid")
}
