//! Stationary scores of a transition matrix and the BallotRank pipeline.
//!
//! The score vector is the fixed point of
//!
//! ```text
//! x = (1 − d)/n · 1 + d · ℓ · x
//! ```
//!
//! [`power_method`] iterates this from the uniform vector and works for every
//! `d` in `(0, 1]`. [`direct_solve`] solves `(I − dℓ) x = (1 − d)/n · 1` and is
//! only defined for `d < 1`, where the system is nonsingular.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condorcet::{analyze, CondorcetReport};
use crate::error::{Error, Result};
use crate::margins::{transition_for, TransitionKind, TransitionMatrix};
use crate::profile::{profile_to_margins, MarginMatrix, Profile};
use crate::CandidateId;

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;
pub const DEFAULT_TIE_EPSILON: f64 = 1e-9;

/// Iterations without the L1 change shrinking before the power method gives up
/// on convergence and averages instead.
pub const PLATEAU_ITERATIONS: usize = 1_000;
/// Trailing iterates kept for the averaging fallback.
pub const CESARO_WINDOW: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingConfig {
    pub d: f64,
    /// Stop once the L1 change between iterates falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DampingConfig {
    fn default() -> Self {
        DampingConfig { d: DEFAULT_DAMPING, tolerance: DEFAULT_TOLERANCE, max_iterations: DEFAULT_MAX_ITERATIONS }
    }
}

impl DampingConfig {
    pub fn with_damping(d: f64) -> Self {
        DampingConfig { d, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d <= 1.0) {
            return Err(Error::InvalidConfig(format!("damping {} outside (0, 1]", self.d)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// How the power method finished when it stopped converging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CesaroFallback {
    /// Detected period of the trailing iterates, if any.
    pub period: Option<usize>,
    /// Number of trailing iterates averaged.
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    /// Zero for the direct solve.
    pub iterations: usize,
    pub converged: bool,
    /// Final L1 change (power method) or fixed-point residual (direct solve).
    pub residual: f64,
    pub fallback: Option<CesaroFallback>,
}

impl ScoreVector {
    pub fn uniform(n: usize) -> Self {
        ScoreVector { scores: vec![1.0 / n as f64; n], iterations: 0, converged: true, residual: 0.0, fallback: None }
    }
}

fn l1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

/// L1 distance between `x` and one damped step from `x`.
pub fn fixed_point_residual(t: &TransitionMatrix, d: f64, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    t.step(d, x, &mut y);
    l1(x, &y)
}

/// Power iteration from the uniform vector.
///
/// Stops when the L1 change drops below `cfg.tolerance`. If the change stops
/// shrinking for [`PLATEAU_ITERATIONS`] iterations (a periodic chain at
/// `d = 1`), the result is the average of the trailing iterates over a whole
/// number of detected periods and `converged` is false.
pub fn power_method(t: &TransitionMatrix, cfg: &DampingConfig) -> Result<ScoreVector> {
    cfg.validate()?;
    t.check_stochastic()?;
    let n = t.n();
    let d = cfg.d;
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(CESARO_WINDOW + 1);
    let mut best = f64::INFINITY;
    let mut stale = 0;
    let mut change = f64::INFINITY;

    for it in 1..=cfg.max_iterations {
        t.step(d, &x, &mut y);
        change = l1(&x, &y);
        std::mem::swap(&mut x, &mut y);
        if change < cfg.tolerance {
            return Ok(ScoreVector {
                scores: normalized(x),
                iterations: it,
                converged: true,
                residual: change,
                fallback: None,
            });
        }
        if history.len() > CESARO_WINDOW {
            history.pop_front();
        }
        history.push_back(x.clone());
        if change < best * (1.0 - 1e-6) {
            best = change;
            stale = 0;
        } else {
            stale += 1;
            if stale >= PLATEAU_ITERATIONS && history.len() > CESARO_WINDOW {
                let (scores, fallback) = cesaro(&history, cfg.tolerance);
                return Ok(ScoreVector {
                    scores,
                    iterations: it,
                    converged: false,
                    residual: change,
                    fallback: Some(fallback),
                });
            }
        }
    }
    Ok(ScoreVector {
        scores: normalized(x),
        iterations: cfg.max_iterations,
        converged: false,
        residual: change,
        fallback: None,
    })
}

fn cesaro(history: &VecDeque<Vec<f64>>, tolerance: f64) -> (Vec<f64>, CesaroFallback) {
    let last = history.len() - 1;
    let threshold = tolerance.max(1e-9);
    let period = (1..=CESARO_WINDOW).find(|&p| l1(&history[last], &history[last - p]) <= threshold);
    let window = period.map_or(CESARO_WINDOW, |p| (CESARO_WINDOW / p) * p);
    let n = history[last].len();
    let mut avg = vec![0.0; n];
    for x in history.iter().skip(history.len() - window) {
        for (a, v) in avg.iter_mut().zip(x) {
            *a += v;
        }
    }
    (normalized(avg), CesaroFallback { period, window })
}

/// Solves `(I − dℓ) x = (1 − d)/n · 1` by LU decomposition.
pub fn direct_solve(t: &TransitionMatrix, d: f64) -> Result<ScoreVector> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "direct solve needs 0 < d < 1, got {d}; I − dℓ is singular at d = 1"
        )));
    }
    t.check_stochastic()?;
    let n = t.n();
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - d * t.entry(i, j));
    let rhs = DVector::from_element(n, (1.0 - d) / n as f64);
    let x = a.lu().solve(&rhs).ok_or(Error::Singular(d))?;
    if x.iter().any(|v| !v.is_finite() || *v < -1e-9) {
        return Err(Error::Singular(d));
    }
    let scores = normalized(x.iter().map(|v| v.max(0.0)).collect());
    let residual = fixed_point_residual(t, d, &scores);
    Ok(ScoreVector { scores, iterations: 0, converged: true, residual, fallback: None })
}

/// Ordered tie groups of candidates, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRanking {
    pub groups: Vec<Vec<CandidateId>>,
    pub epsilon: f64,
    /// Set when only the Condorcet winner is ranked (scores collapsed to an
    /// indicator at `d = 1`); the second group is then unranked.
    pub winner_only: bool,
}

impl WeakRanking {
    /// Groups candidates by exactly equal keys, higher keys first.
    pub fn from_keys<K: PartialOrd + Copy>(keys: &[K]) -> Self {
        let mut order: Vec<CandidateId> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let mut groups: Vec<Vec<CandidateId>> = Vec::new();
        for c in order {
            match groups.last_mut() {
                Some(g) if keys[g[0]] == keys[c] => g.push(c),
                _ => groups.push(vec![c]),
            }
        }
        WeakRanking { groups, epsilon: 0.0, winner_only: false }
    }

    pub fn winner_only(winner: CandidateId, n: usize) -> Self {
        let rest: Vec<CandidateId> = (0..n).filter(|&c| c != winner).collect();
        let mut groups = vec![vec![winner]];
        if !rest.is_empty() {
            groups.push(rest);
        }
        WeakRanking { groups, epsilon: 0.0, winner_only: true }
    }

    /// The top group.
    pub fn winners(&self) -> &[CandidateId] {
        self.groups.first().map_or(&[], |g| g.as_slice())
    }

    /// Index of the group holding `c`.
    pub fn position(&self, c: CandidateId) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&c))
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `a ≻ b ≻ c ~ d` using the given names.
    pub fn display<S: AsRef<str>>(&self, names: &[S]) -> String {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&c| names[c].as_ref()).collect::<Vec<_>>().join(" ~ "))
            .collect::<Vec<_>>()
            .join(" > ")
    }
}

/// Sorts candidates by descending score and merges neighbours whose scores
/// differ by at most `epsilon` into one tie group.
pub fn extract_ranking(scores: &[f64], epsilon: f64) -> WeakRanking {
    let mut order: Vec<CandidateId> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<CandidateId>> = Vec::new();
    let mut prev: Option<f64> = None;
    for c in order {
        let s = scores[c];
        match (groups.last_mut(), prev) {
            (Some(g), Some(p)) if p - s <= epsilon => g.push(c),
            _ => groups.push(vec![c]),
        }
        prev = Some(s);
    }
    WeakRanking { groups, epsilon, winner_only: false }
}

/// Input to the pipeline: raw ballots or precomputed margins.
#[derive(Debug, Clone, PartialEq)]
pub enum Election {
    Ballots(Profile),
    Margins(MarginMatrix),
}

impl From<Profile> for Election {
    fn from(p: Profile) -> Self {
        Election::Ballots(p)
    }
}

impl From<MarginMatrix> for Election {
    fn from(m: MarginMatrix) -> Self {
        Election::Margins(m)
    }
}

impl Election {
    pub fn margins(&self) -> MarginMatrix {
        match self {
            Election::Ballots(p) => profile_to_margins(p),
            Election::Margins(m) => m.clone(),
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match self {
            Election::Ballots(p) => Some(p),
            Election::Margins(_) => None,
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Election::Ballots(p) => p.names().into_iter().map(String::from).collect(),
            Election::Margins(m) => m.names().into_iter().map(String::from).collect(),
        }
    }

    pub fn num_candidates(&self) -> usize {
        match self {
            Election::Ballots(p) => p.num_candidates(),
            Election::Margins(m) => m.n(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BallotRankOutcome {
    pub scores: ScoreVector,
    pub ranking: WeakRanking,
    pub variant: TransitionKind,
    pub config: DampingConfig,
    /// Margins as used, with the diagonal when the variant has self-loops.
    pub margins: MarginMatrix,
    pub transition: TransitionMatrix,
    pub condorcet: CondorcetReport,
    /// L1 gap between power iteration and the direct solve, for `d < 1`.
    pub direct_gap: Option<f64>,
    /// Total win margin was zero.
    pub degenerate: bool,
    /// Margin graph connectivity; scores at `d = 1` depend on the start
    /// vector when this is false.
    pub connected: bool,
}

pub fn ballotrank(input: &Election, cfg: &DampingConfig, variant: TransitionKind) -> Result<BallotRankOutcome> {
    ballotrank_with_epsilon(input, cfg, variant, DEFAULT_TIE_EPSILON)
}

/// Full pipeline: margins → (self-loops) → normalize → power method, with the
/// direct solve as a cross-check when `d < 1`.
///
/// At `d = 1` with a Condorcet winner the scores collapse to an indicator, so
/// the ranking lists the winner alone followed by one unranked group.
pub fn ballotrank_with_epsilon(
    input: &Election,
    cfg: &DampingConfig,
    variant: TransitionKind,
    epsilon: f64,
) -> Result<BallotRankOutcome> {
    cfg.validate()?;
    let raw = input.margins();
    let condorcet = analyze(&raw);
    let connected = raw.is_connected();
    let (margins, transition) = transition_for(&raw, variant);
    let scores = power_method(&transition, cfg)?;
    let direct_gap = if cfg.d < 1.0 {
        let direct = direct_solve(&transition, cfg.d)?;
        Some(l1(&direct.scores, &scores.scores))
    } else {
        None
    };
    let ranking = match condorcet.winner {
        Some(w) if cfg.d == 1.0 && raw.n() > 1 => WeakRanking::winner_only(w, raw.n()),
        _ => extract_ranking(&scores.scores, epsilon),
    };
    Ok(BallotRankOutcome {
        scores,
        ranking,
        variant,
        config: *cfg,
        degenerate: margins.is_degenerate(),
        margins,
        transition,
        condorcet,
        direct_gap,
        connected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub scores: ScoreVector,
    pub winners: Vec<CandidateId>,
    /// Winner set differs from the previous row's.
    pub winner_changed: bool,
}

/// BallotRank at every damping value of `grid`. `d = 0` rows are the uniform
/// teleport limit. Rows are computed in parallel and returned in grid order.
pub fn damping_sweep(
    input: &Election,
    grid: &[f64],
    variant: TransitionKind,
    base: &DampingConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(bad) = grid.iter().find(|d| !(**d >= 0.0 && **d <= 1.0)) {
        return Err(Error::InvalidConfig(format!("damping {bad} outside [0, 1]")));
    }
    let n = input.num_candidates();
    let rows: Vec<Result<(f64, ScoreVector, Vec<CandidateId>)>> = grid
        .par_iter()
        .map(|&d| {
            if d == 0.0 {
                return Ok((d, ScoreVector::uniform(n), (0..n).collect()));
            }
            let cfg = DampingConfig { d, ..*base };
            let out = ballotrank(input, &cfg, variant)?;
            Ok((d, out.scores, out.ranking.winners().to_vec()))
        })
        .collect();
    let mut out: Vec<SweepRow> = Vec::with_capacity(rows.len());
    for row in rows {
        let (d, scores, winners) = row?;
        let winner_changed = out.last().is_some_and(|p| p.winners != winners);
        out.push(SweepRow { d, scores, winners, winner_changed });
    }
    Ok(out)
}

/// `lo, lo + step, …` up to `hi` inclusive, rounded to 12 decimals so that
/// grid points print cleanly.
pub fn damping_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi || step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidConfig(format!("invalid grid {lo}..{hi} step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).map(|d| d.min(1.0)).collect())
}
