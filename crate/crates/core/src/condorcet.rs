//! Condorcet winner, Condorcet loser and Smith set of a margin matrix.

use serde::{Deserialize, Serialize};

use crate::profile::MarginMatrix;
use crate::CandidateId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondorcetReport {
    pub winner: Option<CandidateId>,
    pub loser: Option<CandidateId>,
    /// Sorted ascending.
    pub smith_set: Vec<CandidateId>,
    pub has_top_cycle: bool,
}

/// Analyzes the strict beat relation of `m`; the diagonal is ignored.
///
/// The Smith set is the set of candidates that reach every other candidate
/// through chains of "does not lose to". Every member strictly beats every
/// nonmember, and it is a singleton exactly when a strict Condorcet winner
/// exists.
pub fn analyze(m: &MarginMatrix) -> CondorcetReport {
    let n = m.n();
    let others = |a: CandidateId| (0..n).filter(move |&b| b != a);

    let winner = (0..n).find(|&a| others(a).all(|b| m.beats(a, b)));
    let loser = (0..n).find(|&a| others(a).all(|b| m.beats(b, a)));

    // reach[a][b]: a does not lose to b, transitively closed
    let mut reach = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            reach[a][b] = a == b || !m.beats(b, a);
        }
    }
    for k in 0..n {
        for a in 0..n {
            if reach[a][k] {
                for b in 0..n {
                    if reach[k][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
    }
    let smith_set: Vec<CandidateId> = (0..n).filter(|&a| reach[a].iter().all(|&r| r)).collect();

    CondorcetReport { winner, loser: if n > 1 { loser } else { None }, has_top_cycle: smith_set.len() > 1, smith_set }
}

impl CondorcetReport {
    pub fn in_smith_set(&self, c: CandidateId) -> bool {
        self.smith_set.binary_search(&c).is_ok()
    }
}
