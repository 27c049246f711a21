use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_profile, Criterion, CriterionOutcome, ProfileTransform, Verdict, Witness, WitnessSide};
use crate::condorcet::analyze;
use crate::error::{Error, Result};
use crate::profile::{profile_to_margins, Ballot, Profile};
use crate::rank::{Election, WeakRanking};
use crate::rivals::{run, Method, RunOptions};
use crate::CandidateId;

/// Score tolerance for identities that hold exactly in exact arithmetic.
const IDENTITY_TOLERANCE: f64 = 1e-12;
/// A Condorcet loser's undamped BallotRank score must be below this.
const LOSER_SCORE_BOUND: f64 = 1e-9;

/// Ranges for the random profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialShape {
    pub min_candidates: usize,
    pub max_candidates: usize,
    pub min_voters: usize,
    pub max_voters: usize,
    /// Draw only odd voter counts.
    pub odd_voters: bool,
}

impl Default for TrialShape {
    fn default() -> Self {
        TrialShape { min_candidates: 2, max_candidates: 6, min_voters: 3, max_voters: 41, odd_voters: true }
    }
}

impl TrialShape {
    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let n = rng.random_range(self.min_candidates..=self.max_candidates);
        let v = if self.odd_voters {
            let lo = self.min_voters / 2;
            let hi = (self.max_voters - 1) / 2;
            2 * rng.random_range(lo..=hi) + 1
        } else {
            rng.random_range(self.min_voters..=self.max_voters)
        };
        (n, v)
    }

    fn validate(&self) -> Result<()> {
        let odd_ok = !self.odd_voters || (self.max_voters >= 1 && self.min_voters / 2 <= (self.max_voters - 1) / 2);
        if self.min_candidates == 0
            || self.min_candidates > self.max_candidates
            || self.min_voters == 0
            || self.min_voters > self.max_voters
            || !odd_ok
        {
            return Err(Error::InvalidConfig(format!("invalid trial shape {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub method: Method,
    /// `None` runs majority and Smith undamped and everything else at the
    /// method's default.
    pub damping: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub shape: TrialShape,
    pub run: RunOptions,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            method: Method::BallotRank,
            damping: None,
            trials: 300,
            seed: 0,
            shape: TrialShape::default(),
            run: RunOptions::default(),
        }
    }
}

impl CheckConfig {
    pub fn damping_for(&self, criterion: Criterion) -> Option<f64> {
        if !self.method.is_damped() {
            return None;
        }
        match (self.damping, criterion) {
            (Some(d), _) => Some(d),
            (None, Criterion::Majority | Criterion::Smith) => Some(1.0),
            (None, _) => self.method.default_damping(),
        }
    }
}

struct Evaluation {
    ranking: WeakRanking,
    scores: Option<Vec<f64>>,
}

impl Evaluation {
    fn side(&self, profile: &Profile, damping: Option<f64>) -> WitnessSide {
        WitnessSide {
            profile: profile.to_string(),
            damping,
            scores: self.scores.clone(),
            ranking: self.ranking.display(&profile.names()),
        }
    }
}

fn evaluate(method: Method, profile: &Profile, opts: &RunOptions) -> Result<Evaluation> {
    let r = run(method, &Election::Ballots(profile.clone()), opts)?;
    let scores = r.score_vector().map(|s| s.scores.clone());
    Ok(Evaluation { ranking: r.ranking, scores })
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (CandidateId, CandidateId) {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n)) % n;
    (a, b)
}

/// Swaps `a` and `b` on every ballot that ranks `b` ahead of `a`.
fn make_unanimous(profile: &Profile, a: CandidateId, b: CandidateId) -> Profile {
    let ballots = profile
        .ballots()
        .iter()
        .map(|bal| {
            let mut r = bal.ranking.clone();
            if let (Some(pa), Some(pb)) = (bal.position(a), bal.position(b)) {
                if pb < pa {
                    r.swap(pa, pb);
                }
            }
            Ballot::new(r, bal.multiplicity)
        })
        .collect();
    Profile::new(&profile.names(), ballots).expect("reordering keeps the profile valid")
}

fn majority_candidate(profile: &Profile) -> Option<CandidateId> {
    let mut first = vec![0u64; profile.num_candidates()];
    for b in profile.ballots() {
        first[b.ranking[0]] += b.multiplicity;
    }
    let total = profile.num_voters();
    first.iter().position(|&k| 2 * k > total)
}

/// Checks one trial; returns a witness on violation.
fn trial(
    criterion: Criterion,
    cfg: &CheckConfig,
    opts: &RunOptions,
    damping: Option<f64>,
    index: usize,
) -> Result<Option<Witness>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let (n, v) = cfg.shape.draw(&mut rng);
    let profile = random_profile(n, v, rng.random());
    let base = evaluate(cfg.method, &profile, opts)?;
    let witness = |note: String, after: Option<(&Profile, &Evaluation)>| Witness {
        before: base.side(&profile, damping),
        after: after.map(|(p, e)| e.side(p, damping)),
        note,
    };

    match criterion {
        Criterion::Anonymity => {
            let permuted = ProfileTransform::PermuteVoters { seed: rng.random() }.apply(&profile)?;
            let other = evaluate(cfg.method, &permuted, opts)?;
            let same = match (&base.scores, &other.scores) {
                (Some(x), Some(y)) => x.iter().zip(y).all(|(p, q)| (p - q).abs() <= IDENTITY_TOLERANCE),
                _ => base.ranking.groups == other.ranking.groups,
            };
            Ok((!same).then(|| witness("permuting voters changed the result".into(), Some((&permuted, &other)))))
        }
        Criterion::Neutrality => {
            if n < 2 {
                return Ok(None);
            }
            let (a, b) = distinct_pair(&mut rng, n);
            let swapped = ProfileTransform::SwapCandidates { a, b }.apply(&profile)?;
            let other = evaluate(cfg.method, &swapped, opts)?;
            let swap = |c: CandidateId| {
                if c == a {
                    b
                } else if c == b {
                    a
                } else {
                    c
                }
            };
            let same = match (&base.scores, &other.scores) {
                (Some(x), Some(y)) => (0..n).all(|c| (x[c] - y[swap(c)]).abs() <= IDENTITY_TOLERANCE),
                _ => (0..n).all(|c| base.ranking.position(c) == other.ranking.position(swap(c))),
            };
            let names = profile.names();
            Ok((!same).then(|| {
                witness(
                    format!("swapping {} and {} did not swap their results", names[a], names[b]),
                    Some((&swapped, &other)),
                )
            }))
        }
        Criterion::Majority => {
            let Some(m) = majority_candidate(&profile) else { return Ok(None) };
            let ok = base.ranking.winners() == [m];
            Ok((!ok).then(|| witness(format!("{} is ranked first by a majority", profile.names()[m]), None)))
        }
        Criterion::CondorcetLoser => {
            let report = analyze(&profile_to_margins(&profile));
            let Some(l) = report.loser else { return Ok(None) };
            let mut ok = !base.ranking.winners().contains(&l);
            if cfg.method == Method::BallotRank && damping == Some(1.0) {
                ok &= base.scores.as_ref().is_some_and(|s| s[l] < LOSER_SCORE_BOUND);
            }
            Ok((!ok).then(|| witness(format!("Condorcet loser {} is not last", profile.names()[l]), None)))
        }
        Criterion::Pareto => {
            if n < 2 {
                return Ok(None);
            }
            let (a, b) = distinct_pair(&mut rng, n);
            let unanimous = make_unanimous(&profile, a, b);
            let other = evaluate(cfg.method, &unanimous, opts)?;
            let ok = match &other.scores {
                Some(s) => s[a] >= s[b] - IDENTITY_TOLERANCE,
                None => other.ranking.position(a) <= other.ranking.position(b),
            };
            let names = profile.names();
            Ok((!ok).then(|| {
                witness(
                    format!("every voter prefers {} to {} but {} scores higher", names[a], names[b], names[b]),
                    Some((&unanimous, &other)),
                )
            }))
        }
        Criterion::Smith => {
            let report = analyze(&profile_to_margins(&profile));
            let (inside, outside): (Vec<CandidateId>, Vec<CandidateId>) = (0..n).partition(|&c| report.in_smith_set(c));
            if outside.is_empty() {
                return Ok(None);
            }
            let ok = match &base.scores {
                Some(s) => {
                    let lo = inside.iter().map(|&c| s[c]).fold(f64::INFINITY, f64::min);
                    let hi = outside.iter().map(|&c| s[c]).fold(f64::NEG_INFINITY, f64::max);
                    lo > hi
                }
                None => {
                    let worst_in = inside.iter().filter_map(|&c| base.ranking.position(c)).max();
                    let best_out = outside.iter().filter_map(|&c| base.ranking.position(c)).min();
                    worst_in < best_out
                }
            };
            Ok((!ok).then(|| witness("a Smith set member does not outrank every nonmember".into(), None)))
        }
        _ => Err(Error::InvalidConfig(format!("{criterion} is not checked on random profiles"))),
    }
}

/// Fuzzes a criterion the method is meant to satisfy.
///
/// Each trial draws its own profile from a stream of the seeded generator, so
/// trial `i` is the same whatever the trial count. Trials run in parallel; the
/// reported witness is the one with the lowest index.
pub fn check_positive(criterion: Criterion, cfg: &CheckConfig) -> Result<CriterionOutcome> {
    if !criterion.is_positive() {
        return Err(Error::InvalidConfig(format!("{criterion} is not checked on random profiles")));
    }
    cfg.shape.validate()?;
    let damping = cfg.damping_for(criterion);
    let opts = RunOptions { damping, ..cfg.run };
    let report_only = matches!(criterion, Criterion::Majority | Criterion::Smith) && damping.is_some_and(|d| d < 1.0);

    let results: Vec<Option<Witness>> =
        (0..cfg.trials).into_par_iter().map(|i| trial(criterion, cfg, &opts, damping, i)).collect::<Result<_>>()?;
    let violations = results.iter().filter(|w| w.is_some()).count();
    let witness = results.into_iter().flatten().next();
    Ok(CriterionOutcome {
        criterion,
        verdict: if witness.is_some() { Verdict::CounterexampleFound } else { Verdict::HoldsOnSample },
        witness,
        trials: cfg.trials,
        violations,
        report_only,
        method: cfg.method.as_str().into(),
        damping,
        seed: Some(cfg.seed),
        diff: Vec::new(),
    })
}
