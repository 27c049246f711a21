use serde::{Deserialize, Serialize};

use super::{Method, MethodResult, MethodScores, MethodTrace};
use crate::profile::MarginMatrix;
use crate::rank::WeakRanking;
use crate::CandidateId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDecision {
    pub winner: CandidateId,
    pub loser: CandidateId,
    pub margin: u64,
    /// False when locking would have closed a cycle.
    pub locked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedPairsTrace {
    /// Every strict victory in processing order.
    pub pairs: Vec<PairDecision>,
    /// Some victories shared a margin and were ordered by `(winner, loser)`.
    pub equal_margins: bool,
}

impl RankedPairsTrace {
    pub fn locked(&self) -> impl Iterator<Item = &PairDecision> {
        self.pairs.iter().filter(|p| p.locked)
    }
}

fn reaches(adj: &[Vec<bool>], from: CandidateId, to: CandidateId) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        if a == to {
            return true;
        }
        for (b, &edge) in adj[a].iter().enumerate() {
            if edge && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

/// Locks victories from largest margin down, skipping any that would close a
/// cycle, then ranks by the locked graph.
///
/// The ranking is layered: each group holds the candidates not beaten by a
/// locked edge from any candidate still unranked.
pub fn ranked_pairs(m: &MarginMatrix) -> MethodResult {
    let n = m.n();
    let mut victories: Vec<(CandidateId, CandidateId, u64)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| m.beats(a, b))
        .map(|(a, b)| (a, b, m.margin(a, b)))
        .collect();
    victories.sort_by(|x, y| y.2.cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    let equal_margins = victories.windows(2).any(|w| w[0].2 == w[1].2);

    let mut adj = vec![vec![false; n]; n];
    let mut pairs = Vec::with_capacity(victories.len());
    for (winner, loser, margin) in victories {
        let locked = !reaches(&adj, loser, winner);
        if locked {
            adj[winner][loser] = true;
        }
        pairs.push(PairDecision { winner, loser, margin, locked });
    }

    let mut remaining: Vec<CandidateId> = (0..n).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let (top, rest): (Vec<_>, Vec<_>) = remaining.iter().partition(|&&c| !remaining.iter().any(|&o| adj[o][c]));
        debug_assert!(!top.is_empty(), "locked graph has a cycle");
        groups.push(top);
        remaining = rest;
    }

    MethodResult::new(
        Method::RankedPairs,
        WeakRanking { groups, epsilon: 0.0, winner_only: false },
        MethodScores::None,
        MethodTrace::RankedPairs(RankedPairsTrace { pairs, equal_margins }),
    )
}
