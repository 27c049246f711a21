use serde::{Deserialize, Serialize};

use super::{Method, MethodResult, MethodScores, MethodTrace};
use crate::profile::MarginMatrix;
use crate::rank::WeakRanking;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchulzeTrace {
    /// `strengths[a][b]`: strongest path from `a` to `b`.
    pub strengths: Vec<Vec<u64>>,
}

/// Widest paths over the margin digraph: a path is as strong as its weakest
/// margin, and `p[a][b]` is the strongest path from `a` to `b`.
pub fn strongest_paths(m: &MarginMatrix) -> Vec<Vec<u64>> {
    let n = m.n();
    let mut p: Vec<Vec<u64>> =
        (0..n).map(|a| (0..n).map(|b| if a == b { 0 } else { m.margin(a, b) }).collect()).collect();
    for k in 0..n {
        for a in 0..n {
            if a == k || p[a][k] == 0 {
                continue;
            }
            for b in 0..n {
                if b != a && b != k {
                    p[a][b] = p[a][b].max(p[a][k].min(p[k][b]));
                }
            }
        }
    }
    p
}

/// Ranks candidates by how many opponents they beat on strongest paths.
pub fn schulze(m: &MarginMatrix) -> MethodResult {
    let n = m.n();
    let p = strongest_paths(m);
    let wins: Vec<usize> = (0..n).map(|a| (0..n).filter(|&b| p[a][b] > p[b][a]).count()).collect();
    MethodResult::new(
        Method::Schulze,
        WeakRanking::from_keys(&wins),
        MethodScores::BeatpathWins(wins),
        MethodTrace::Schulze(SchulzeTrace { strengths: p }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn oakland_paths() {
        let p = strongest_paths(&fixtures::oakland());
        assert_eq!(p[0][1], 299);
        assert_eq!(p[1][0], 46);
        assert_eq!(p[0][2], 299);
        assert_eq!(p[2][1], 46);
        let r = schulze(&fixtures::oakland());
        assert_eq!(r.scores, MethodScores::BeatpathWins(vec![2, 1, 0]));
        assert_eq!(r.winners(), &[0]);
    }

    #[test]
    fn minneapolis_as_printed() {
        let m = fixtures::minneapolis();
        let p = strongest_paths(&m);
        // Arab reaches Worlobah through Gordon at strength 73, beating the direct 15
        assert_eq!((p[1][2], p[2][1]), (73, 15));
        assert_eq!(schulze(&m).winners(), &[1]);
    }

    #[test]
    fn symmetric_cycle_ties() {
        let m = MarginMatrix::from_rows(&["a", "b", "c"], &[vec![0, 5, 0], vec![0, 0, 5], vec![5, 0, 0]]).unwrap();
        assert_eq!(schulze(&m).ranking.groups, vec![vec![0, 1, 2]]);
    }
}
