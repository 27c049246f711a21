//! Win/loss aggregates, the self-loop diagonal and column-stochastic
//! transition matrices.
//!
//! With self-loops the diagonal entry of candidate `a` is its share of the
//! total win margin, `TW(a) / TW`. Column `b` of the transition matrix is then
//! column `b` of the margin matrix divided by its sum, so a candidate hands its
//! score to everyone who beats it, in proportion to the loss margins, and keeps
//! a share proportional to its own wins.

use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{Candidate, MarginMatrix};
use crate::{CandidateId, Rational};

/// Column sums may drift this far from 1 and still count as stochastic.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginAggregates {
    /// Total win margin per candidate (row sums, diagonal excluded).
    pub tw: Vec<u64>,
    pub tw_total: u64,
    /// Total loss margin per candidate, diagonal excluded.
    pub tl_tilde: Vec<u64>,
    /// Total loss margin including the self-loop; `None` without a diagonal.
    pub tl: Option<Vec<Rational>>,
    /// Candidates beaten by each candidate.
    pub win_sets: Vec<Vec<CandidateId>>,
    /// Number of pairwise defeats per candidate.
    pub loss_counts: Vec<usize>,
}

pub fn aggregates(m: &MarginMatrix) -> MarginAggregates {
    let n = m.n();
    let mut tw = vec![0u64; n];
    let mut tl_tilde = vec![0u64; n];
    let mut win_sets = vec![Vec::new(); n];
    let mut loss_counts = vec![0usize; n];
    for a in 0..n {
        for b in 0..n {
            let x = m.margin(a, b);
            if a != b && x > 0 {
                tw[a] += x;
                tl_tilde[b] += x;
                win_sets[a].push(b);
                loss_counts[b] += 1;
            }
        }
    }
    let tl =
        m.diagonal().map(|d| tl_tilde.iter().zip(d).map(|(&t, &dd)| Rational::from_integer(t as i128) + dd).collect());
    MarginAggregates { tw_total: tw.iter().sum(), tw, tl_tilde, tl, win_sets, loss_counts }
}

/// Sets `M(a, a) = TW(a) / TW`. When `TW = 0` every diagonal entry is zero and
/// the result is flagged degenerate.
pub fn apply_self_loops(m: &MarginMatrix) -> MarginMatrix {
    let agg = aggregates(m);
    if agg.tw_total == 0 {
        return m.with_diagonal(vec![Rational::zero(); m.n()], true);
    }
    let total = agg.tw_total as i128;
    let diagonal = agg.tw.iter().map(|&w| Rational::new(w as i128, total)).collect();
    m.with_diagonal(diagonal, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    /// Margin-weighted with the self-loop diagonal (BallotRank).
    SelfLoops,
    /// Margin-weighted, no diagonal.
    NoSelfLoops,
    /// Each defeat weighted equally (plain PageRank on the beat graph).
    Unweighted,
}

impl TransitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionKind::SelfLoops => "selfloops",
            TransitionKind::NoSelfLoops => "noselfloops",
            TransitionKind::Unweighted => "unweighted",
        }
    }
}

impl std::str::FromStr for TransitionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "selfloops" | "self_loops" => Ok(TransitionKind::SelfLoops),
            "noselfloops" | "no_self_loops" => Ok(TransitionKind::NoSelfLoops),
            "unweighted" => Ok(TransitionKind::Unweighted),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

/// Dense column-stochastic matrix; `entry(a, b)` is the share of `b`'s score
/// sent to `a` per step.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    // row-major
    entries: Vec<f64>,
    kind: Option<TransitionKind>,
    candidates: Vec<Candidate>,
}

impl TransitionMatrix {
    /// Builds a matrix from columns, validating stochasticity. Candidates are
    /// named `0..n`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let mut entries = vec![0.0; n * n];
        for (b, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidMargins(format!("column {b} has {} entries", col.len())));
            }
            for (a, &x) in col.iter().enumerate() {
                entries[a * n + b] = x;
            }
        }
        let t = TransitionMatrix {
            n,
            entries,
            kind: None,
            candidates: (0..n).map(|id| Candidate { id, name: id.to_string() }).collect(),
        };
        t.check_stochastic()?;
        Ok(t)
    }

    pub(crate) fn from_row_major(entries: Vec<f64>, candidates: Vec<Candidate>) -> Self {
        TransitionMatrix { n: candidates.len(), entries, kind: None, candidates }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, a: CandidateId, b: CandidateId) -> f64 {
        self.entries[a * self.n + b]
    }

    pub fn row(&self, a: CandidateId) -> &[f64] {
        &self.entries[a * self.n..(a + 1) * self.n]
    }

    pub fn column(&self, b: CandidateId) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |a| self.entry(a, b))
    }

    /// `None` for matrices built directly from columns.
    pub fn kind(&self) -> Option<TransitionKind> {
        self.kind
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Fails on a negative entry or a column not summing to 1.
    pub fn check_stochastic(&self) -> Result<()> {
        for b in 0..self.n {
            let mut sum = 0.0;
            for x in self.column(b) {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::NotStochastic { column: b, sum: f64::NAN });
                }
                sum += x;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic { column: b, sum });
            }
        }
        Ok(())
    }

    /// `x ↦ d·ℓ·x + (1 − d)/n`, written into `out`.
    pub fn step(&self, d: f64, x: &[f64], out: &mut [f64]) {
        let teleport = (1.0 - d) / self.n as f64;
        for (a, o) in out.iter_mut().enumerate() {
            let s: f64 = self.row(a).iter().zip(x).map(|(l, v)| l * v).sum();
            *o = teleport + d * s;
        }
    }

    /// Same header convention as the margin CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push(',');
        let names: Vec<&str> = self.candidates.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for a in 0..self.n {
            out.push_str(names[a]);
            for x in self.row(a) {
                let _ = write!(out, ",{}", format_sig(*x, 12));
            }
            out.push('\n');
        }
        out
    }

    /// Graphviz rendering. Edges run from loser to winner, labelled with the
    /// transition share; every self-loop is drawn, zero or not.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ballotrank {\n");
        for c in &self.candidates {
            let _ = writeln!(out, "  \"{}\";", c.name);
        }
        for b in 0..self.n {
            for a in 0..self.n {
                let x = self.entry(a, b);
                if a == b || x > 0.0 {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [label=\"{}\"];",
                        self.candidates[b].name,
                        self.candidates[a].name,
                        format_sig(x, 3)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    rounded.to_string()
}

/// Exact kernel for `kind`, columns first, before normalization.
fn exact_kernel(m: &MarginMatrix, kind: TransitionKind) -> Vec<Vec<Rational>> {
    let n = m.n();
    let agg = aggregates(m);
    let mut cols = vec![vec![Rational::zero(); n]; n];
    for (b, col) in cols.iter_mut().enumerate() {
        for (a, cell) in col.iter_mut().enumerate() {
            *cell = match kind {
                TransitionKind::SelfLoops => m.entry(a, b),
                TransitionKind::NoSelfLoops if a != b => m.entry(a, b),
                TransitionKind::Unweighted if m.beats(a, b) => Rational::new(1, agg.loss_counts[b] as i128),
                _ => Rational::zero(),
            };
        }
    }
    cols
}

/// Exact column-normalized matrix, indexed `[a][b]`. A column summing to zero
/// becomes a pure self-loop. Self-loops are applied first if `m` lacks them.
pub fn exact_transition(m: &MarginMatrix, kind: TransitionKind) -> Vec<Vec<Rational>> {
    if kind == TransitionKind::SelfLoops && !m.has_diagonal() {
        return exact_transition(&apply_self_loops(m), kind);
    }
    let n = m.n();
    let cols = exact_kernel(m, kind);
    let mut out = vec![vec![Rational::zero(); n]; n];
    for (b, col) in cols.iter().enumerate() {
        let sum: Rational = col.iter().copied().sum();
        if sum.is_zero() {
            out[b][b] = Rational::from_integer(1);
        } else {
            for (a, &x) in col.iter().enumerate() {
                out[a][b] = x / sum;
            }
        }
    }
    out
}

/// Column-normalizes `m` into a transition matrix of the given kind.
///
/// For [`TransitionKind::SelfLoops`] the diagonal is applied if missing; for
/// the other kinds any diagonal is ignored. Entries are computed exactly
/// and rounded once to `f64`.
pub fn normalize(m: &MarginMatrix, kind: TransitionKind) -> TransitionMatrix {
    let n = m.n();
    let exact = exact_transition(m, kind);
    let mut entries = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            entries[a * n + b] = exact[a][b].to_f64().unwrap_or(f64::NAN);
        }
    }
    let mut t = TransitionMatrix::from_row_major(entries, m.candidates().to_vec());
    t.kind = Some(kind);
    t
}

/// Margins → (diagonal) → normalized matrix, for any kind.
pub fn transition_for(m: &MarginMatrix, kind: TransitionKind) -> (MarginMatrix, TransitionMatrix) {
    let prepared = match kind {
        TransitionKind::SelfLoops if m.has_diagonal() => m.clone(),
        TransitionKind::SelfLoops => apply_self_loops(m),
        _ => m.without_diagonal(),
    };
    let t = normalize(&prepared, kind);
    (prepared, t)
}
