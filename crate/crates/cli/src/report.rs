//! Serializable report types and their text and CSV renderings.

use std::fmt::Write as _;

use ballotrank::condorcet::CondorcetReport;
use ballotrank::criteria::{CriterionOutcome, Verdict};
use ballotrank::margins::{format_sig, TransitionKind};
use ballotrank::rank::{CesaroFallback, WeakRanking};
use ballotrank::rivals::{Method, MethodScores, MethodTrace};
use serde::Serialize;
use serde_json::Value;

/// Significant digits for floats in text output.
pub const TEXT_DIGITS: usize = 4;
/// Significant digits for floats in CSV output.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct InputDescriptor {
    pub file: String,
    pub format: &'static str,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub damping: Option<f64>,
    pub variant: Option<TransitionKind>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub tie_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CondorcetSummary {
    pub winner: Option<String>,
    pub loser: Option<String>,
    pub smith_set: Vec<String>,
    pub has_top_cycle: bool,
}

impl CondorcetSummary {
    pub fn new(r: &CondorcetReport, names: &[String]) -> Self {
        CondorcetSummary {
            winner: r.winner.map(|c| names[c].clone()),
            loser: r.loser.map(|c| names[c].clone()),
            smith_set: r.smith_set.iter().map(|&c| names[c].clone()).collect(),
            has_top_cycle: r.has_top_cycle,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub fallback: Option<CesaroFallback>,
    /// L1 gap to the direct solve, when one was run.
    pub direct_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TabulationReport {
    pub input: InputDescriptor,
    pub method: Method,
    pub config: ConfigReport,
    pub candidates: Vec<String>,
    /// What `scores` holds: `stationary`, `worst_defeat`, `beatpath_wins`,
    /// `elimination_round` or `none`.
    pub score_kind: &'static str,
    pub scores: Value,
    pub ranking: Vec<Vec<String>>,
    pub winner: Vec<String>,
    pub condorcet: CondorcetSummary,
    pub solver: Option<SolverReport>,
    pub trace: MethodTrace,
}

pub fn ranking_names(r: &WeakRanking, names: &[String]) -> Vec<Vec<String>> {
    r.groups.iter().map(|g| g.iter().map(|&c| names[c].clone()).collect()).collect()
}

pub fn score_parts(s: &MethodScores) -> (&'static str, Value) {
    fn v<T: Serialize>(x: &T) -> Value {
        serde_json::to_value(x).expect("scores serialize")
    }
    match s {
        MethodScores::Stationary(sv) => ("stationary", v(&sv.scores)),
        MethodScores::WorstDefeat(w) => ("worst_defeat", v(w)),
        MethodScores::BeatpathWins(w) => ("beatpath_wins", v(w)),
        MethodScores::EliminationRound(r) => ("elimination_round", v(r)),
        MethodScores::None => ("none", Value::Null),
    }
}

fn value_text(v: &Value, digits: usize) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_sig(n.as_f64().unwrap_or(f64::NAN), digits),
        Value::Number(n) => n.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn join_group(g: &[String]) -> String {
    g.join(" ~ ")
}

fn ranking_text(r: &[Vec<String>]) -> String {
    r.iter().map(|g| join_group(g)).collect::<Vec<_>>().join(" > ")
}

impl TabulationReport {
    fn score_cell(&self, c: usize, digits: usize) -> String {
        match &self.scores {
            Value::Array(items) => value_text(&items[c], digits),
            _ => String::new(),
        }
    }

    fn rank_of(&self, name: &str) -> usize {
        self.ranking.iter().position(|g| g.iter().any(|n| n == name)).map_or(0, |i| i + 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "method: {}", self.method);
        if let Some(d) = self.config.damping {
            let _ = write!(out, " (d = {}", format_sig(d, TEXT_DIGITS));
            if let Some(v) = self.config.variant {
                let _ = write!(out, ", {}", v.as_str());
            }
            out.push(')');
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "input: {} ({})", self.input.file, self.input.format);
        let width = self.candidates.iter().map(String::len).max().unwrap_or(0).max(9);
        let _ = writeln!(out, "{:<width$}  {:>10}  rank", "candidate", self.score_kind);
        for (c, name) in self.candidates.iter().enumerate() {
            let _ = writeln!(out, "{:<width$}  {:>10}  {}", name, self.score_cell(c, TEXT_DIGITS), self.rank_of(name));
        }
        let _ = writeln!(out, "ranking: {}", ranking_text(&self.ranking));
        let _ = writeln!(out, "winner: {}", join_group(&self.winner));
        let cw = &self.condorcet;
        let _ = writeln!(
            out,
            "condorcet winner: {}; loser: {}; smith set: {}",
            cw.winner.as_deref().unwrap_or("none"),
            cw.loser.as_deref().unwrap_or("none"),
            cw.smith_set.join(", ")
        );
        if let Some(s) = &self.solver {
            let _ = write!(
                out,
                "solver: {} iterations, {}, residual {:.1e}",
                s.iterations,
                if s.converged { "converged" } else { "NOT converged" },
                s.residual
            );
            if let Some(fb) = &s.fallback {
                let _ = write!(out, ", averaged over {} iterates", fb.window);
            }
            let _ = writeln!(out);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("candidate,score,rank\n");
        for (c, name) in self.candidates.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", name, self.score_cell(c, CSV_DIGITS), self.rank_of(name));
        }
        out
    }

    pub fn converged(&self) -> bool {
        self.solver.as_ref().is_none_or(|s| s.converged)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodWinner {
    pub method: Method,
    pub winner: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub input: InputDescriptor,
    pub winners: Vec<MethodWinner>,
    /// All winner sets are identical.
    #[serde(rename = "match")]
    pub agreement: bool,
    pub reports: Vec<TabulationReport>,
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {} ({})", self.input.file, self.input.format);
        for w in &self.winners {
            let _ = writeln!(out, "{:<12} {}", w.method.as_str(), join_group(&w.winner));
        }
        let _ = writeln!(out, "match: {}", if self.agreement { "yes" } else { "no" });
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,winner\n");
        for w in &self.winners {
            let _ = writeln!(out, "{},{}", w.method, w.winner.join("|"));
        }
        let _ = writeln!(out, "match,{}", self.agreement);
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowReport {
    pub d: f64,
    pub scores: Vec<f64>,
    pub winner: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    /// The winner set differs from the previous row's.
    pub bifurcation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub input: InputDescriptor,
    pub config: ConfigReport,
    pub candidates: Vec<String>,
    pub rows: Vec<SweepRowReport>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d");
        for name in &self.candidates {
            let _ = write!(out, ",{name}");
        }
        out.push_str(",winner,converged,iterations,bifurcation\n");
        for r in &self.rows {
            out.push_str(&format_sig(r.d, CSV_DIGITS));
            for s in &r.scores {
                let _ = write!(out, ",{}", format_sig(*s, CSV_DIGITS));
            }
            let _ = writeln!(out, ",{},{},{},{}", r.winner.join("|"), r.converged, r.iterations, r.bifurcation);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.candidates.iter().map(String::len).max().unwrap_or(0).max(8);
        let _ = write!(out, "{:>6}", "d");
        for name in &self.candidates {
            let _ = write!(out, "  {name:>width$}");
        }
        out.push_str("  winner\n");
        for r in &self.rows {
            let _ = write!(out, "{:>6}", format_sig(r.d, TEXT_DIGITS));
            for s in &r.scores {
                let _ = write!(out, "  {:>width$}", format_sig(*s, TEXT_DIGITS));
            }
            let _ = write!(out, "  {}", r.winner.join(" ~ "));
            if r.bifurcation {
                out.push_str("  *");
            }
            if !r.converged {
                out.push_str("  (not converged)");
            }
            out.push('\n');
        }
        out
    }

    pub fn converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerdictCounts {
    pub holds_on_sample: usize,
    pub counterexample_found: usize,
    pub fixture_reproduced: usize,
    pub fixture_mismatch: usize,
}

impl VerdictCounts {
    pub fn tally(outcomes: &[CriterionOutcome]) -> Self {
        let mut c = VerdictCounts::default();
        for o in outcomes {
            match o.verdict {
                Verdict::HoldsOnSample => c.holds_on_sample += 1,
                Verdict::CounterexampleFound => c.counterexample_found += 1,
                Verdict::FixtureReproduced => c.fixture_reproduced += 1,
                Verdict::FixtureMismatch => c.fixture_mismatch += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriteriaReport {
    pub suite: &'static str,
    pub method: Method,
    pub seed: Option<u64>,
    pub trials: usize,
    pub summary: VerdictCounts,
    pub outcomes: Vec<CriterionOutcome>,
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsOnSample => "holds_on_sample",
        Verdict::CounterexampleFound => "counterexample_found",
        Verdict::FixtureReproduced => "fixture_reproduced",
        Verdict::FixtureMismatch => "fixture_mismatch",
    }
}

impl CriteriaReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite: {} (method {})", self.suite, self.method);
        for o in &self.outcomes {
            let _ = write!(out, "{:<16} {:<21}", o.criterion.as_str(), verdict_str(o.verdict));
            if o.trials > 0 {
                let _ = write!(out, " {} trials, {} violations", o.trials, o.violations);
            }
            if let Some(d) = o.damping {
                let _ = write!(out, " (d = {})", format_sig(d, TEXT_DIGITS));
            }
            if o.report_only {
                out.push_str(" [report only]");
            }
            out.push('\n');
            for line in &o.diff {
                let _ = writeln!(out, "    {line}");
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,verdict,trials,violations,damping,report_only\n");
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                o.criterion,
                verdict_str(o.verdict),
                o.trials,
                o.violations,
                o.damping.map(|d| format_sig(d, CSV_DIGITS)).unwrap_or_default(),
                o.report_only
            );
        }
        out
    }

    pub fn has_mismatch(&self) -> bool {
        self.summary.fixture_mismatch > 0
    }
}
