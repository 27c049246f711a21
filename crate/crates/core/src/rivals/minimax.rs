use serde::{Deserialize, Serialize};

use super::{Method, MethodResult, MethodScores, MethodTrace};
use crate::profile::MarginMatrix;
use crate::rank::WeakRanking;
use crate::CandidateId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaxTrace {
    /// Opponent inflicting each candidate's worst defeat; the lowest id
    /// among equally bad defeats, `None` if undefeated.
    pub worst_opponent: Vec<Option<CandidateId>>,
}

/// Ranks candidates by the margin of their worst pairwise defeat, smallest
/// first. Equal worst defeats tie.
pub fn minimax(m: &MarginMatrix) -> MethodResult {
    let n = m.n();
    let mut worst = vec![0u64; n];
    let mut worst_opponent = vec![None; n];
    for c in 0..n {
        for o in 0..n {
            let x = m.margin(o, c);
            if o != c && x > worst[c] {
                worst[c] = x;
                worst_opponent[c] = Some(o);
            }
        }
    }
    let keys: Vec<i128> = worst.iter().map(|&w| -(w as i128)).collect();
    MethodResult::new(
        Method::Minimax,
        WeakRanking::from_keys(&keys),
        MethodScores::WorstDefeat(worst),
        MethodTrace::Minimax(MinimaxTrace { worst_opponent }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::profile::profile_to_margins;

    #[test]
    fn oakland() {
        let r = minimax(&fixtures::oakland());
        assert_eq!(r.scores, MethodScores::WorstDefeat(vec![46, 299, 557]));
        assert_eq!(r.ranking.groups, vec![vec![0], vec![1], vec![2]]);
        let MethodTrace::Minimax(t) = &r.trace else { unreachable!() };
        assert_eq!(t.worst_opponent, vec![Some(2), Some(0), Some(1)]);
    }

    #[test]
    fn minneapolis_as_printed() {
        // Arab's only defeat is by 15, the smallest in the top cycle
        let m = fixtures::minneapolis();
        let r = minimax(&m);
        assert_eq!(r.scores, MethodScores::WorstDefeat(vec![225, 15, 73, 5079, 3239]));
        assert_eq!(r.winners(), &[m.candidate_id("Arab").unwrap()]);
    }

    #[test]
    fn toy_undefeated_first() {
        let r = minimax(&profile_to_margins(&fixtures::toy()));
        assert_eq!(r.winners(), &[0]);
        let MethodScores::WorstDefeat(w) = &r.scores else { unreachable!() };
        assert_eq!(w[0], 0);
    }
}
