use serde::{Deserialize, Serialize};

use super::{Method, MethodResult, MethodScores, MethodTrace};
use crate::error::Result;
use crate::profile::Profile;
use crate::rank::WeakRanking;
use crate::CandidateId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrvRound {
    /// First-preference counts of the candidates still standing, by id.
    pub tallies: Vec<(CandidateId, u64)>,
    /// Voters whose ballots still name a standing candidate.
    pub active: u64,
    pub exhausted: u64,
    /// Candidate holding a strict majority of active ballots, if any.
    pub majority: Option<CandidateId>,
    pub eliminated: Vec<CandidateId>,
    /// Every standing candidate tied for last, so only the highest id went.
    pub tiebreak: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrvTrace {
    pub rounds: Vec<IrvRound>,
    pub winner: CandidateId,
    /// First round (1-based) in which some candidate held a majority; `None`
    /// only if every ballot exhausted.
    pub majority_round: Option<usize>,
}

/// Instant runoff. Each round counts every active ballot for its highest
/// ranked standing candidate; exhausted ballots drop out.
///
/// The lowest-polling candidates are all eliminated together. If that would
/// eliminate everyone left, only the one with the highest id goes. Rounds run
/// until one candidate remains, so the ranking covers the whole field: later
/// eliminations rank higher and same-round eliminations tie. A majority
/// holder is never eliminated, so the survivor is the usual IRV winner. The
/// final round records the survivor's own tally.
pub fn irv(profile: &Profile) -> Result<MethodResult> {
    let n = profile.num_candidates();
    let mut standing = vec![true; n];
    let mut left = n;
    let mut eliminated_in: Vec<Option<usize>> = vec![None; n];
    let mut rounds = Vec::new();
    let mut majority_round = None;

    loop {
        let mut counts = vec![0u64; n];
        let mut exhausted = 0;
        for b in profile.ballots() {
            match b.ranking.iter().find(|&&c| standing[c]) {
                Some(&c) => counts[c] += b.multiplicity,
                None => exhausted += b.multiplicity,
            }
        }
        let active: u64 = counts.iter().sum();
        let tallies: Vec<(CandidateId, u64)> = (0..n).filter(|&c| standing[c]).map(|c| (c, counts[c])).collect();
        let majority = tallies.iter().find(|&&(_, k)| 2 * k > active).map(|&(c, _)| c);
        if majority.is_some() && majority_round.is_none() {
            majority_round = Some(rounds.len() + 1);
        }
        if left == 1 {
            rounds.push(IrvRound { tallies, active, exhausted, majority, eliminated: vec![], tiebreak: false });
            break;
        }
        let low = tallies.iter().map(|&(_, k)| k).min().unwrap_or(0);
        let mut eliminated: Vec<CandidateId> = tallies.iter().filter(|&&(_, k)| k == low).map(|&(c, _)| c).collect();
        let tiebreak = eliminated.len() == left;
        if tiebreak {
            eliminated = vec![*eliminated.last().expect("field is nonempty")];
        }
        for &c in &eliminated {
            standing[c] = false;
            eliminated_in[c] = Some(rounds.len() + 1);
        }
        left -= eliminated.len();
        rounds.push(IrvRound { tallies, active, exhausted, majority, eliminated, tiebreak });
    }

    let winner = standing.iter().position(|&s| s).expect("one candidate survives");
    let keys: Vec<usize> = eliminated_in.iter().map(|r| r.unwrap_or(usize::MAX)).collect();
    Ok(MethodResult::new(
        Method::Irv,
        WeakRanking::from_keys(&keys),
        MethodScores::EliminationRound(eliminated_in),
        MethodTrace::Irv(IrvTrace { rounds, winner, majority_round }),
    ))
}
