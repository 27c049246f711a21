use serde::{Deserialize, Serialize};

use super::{Method, MethodResult, MethodScores, MethodTrace};
use crate::error::{Error, Result};
use crate::margins::TransitionMatrix;
use crate::profile::Profile;
use crate::rank::{extract_ranking, power_method, DampingConfig};

/// Convergence voting is run undamped unless asked otherwise.
pub const CV_DEFAULT_DAMPING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTrace {
    /// `votes[a][b]`: voters ranking `a` above `b`, the weight of edge `b → a`.
    pub votes: Vec<Vec<u64>>,
    /// `V·(n − 1)` minus the votes each candidate lost.
    pub diagonal: Vec<u64>,
    pub damping: f64,
}

/// Raw pairwise vote counts and the convergence-voting diagonal.
pub fn pairwise_votes(profile: &Profile) -> (Vec<Vec<u64>>, Vec<u64>) {
    let n = profile.num_candidates();
    let votes = profile.pairwise_wins();
    let budget = profile.num_voters() * (n as u64 - 1);
    let diagonal = (0..n).map(|b| budget - (0..n).map(|a| votes[a][b]).sum::<u64>()).collect();
    (votes, diagonal)
}

/// Convergence voting: a random walk on raw pairwise votes in both directions
/// plus a self-loop, instead of on margins.
///
/// Every column of the kernel sums to `V·(n − 1)`, so normalization is a
/// single division. Requires complete ballots.
pub fn convergence_voting(profile: &Profile, cfg: &DampingConfig, epsilon: f64) -> Result<MethodResult> {
    let n = profile.num_candidates();
    if let Some((i, b)) = profile.ballots().iter().enumerate().find(|(_, b)| b.ranking.len() != n) {
        return Err(Error::PartialBallot { method: "cv", ballot: i, ranked: b.ranking.len(), candidates: n });
    }
    let (votes, diagonal) = pairwise_votes(profile);
    let total = profile.num_voters() as f64 * (n as f64 - 1.0);
    let mut entries = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            entries[a * n + b] = if n == 1 {
                1.0
            } else if a == b {
                diagonal[b] as f64 / total
            } else {
                votes[a][b] as f64 / total
            };
        }
    }
    let t = TransitionMatrix::from_row_major(entries, profile.candidates().to_vec());
    let scores = power_method(&t, cfg)?;
    let ranking = extract_ranking(&scores.scores, epsilon);
    Ok(MethodResult::new(
        Method::Cv,
        ranking,
        MethodScores::Stationary(scores),
        MethodTrace::Cv(CvTrace { votes, diagonal, damping: cfg.d }),
    ))
}
