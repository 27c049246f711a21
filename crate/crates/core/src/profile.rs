//! Electorates: candidates, ranked ballots, and pairwise margin matrices.
//!
//! Ballot files are UTF-8 text:
//!
//! ```text
//! # comment
//! candidates: a, b, c
//! 7: a > b > c
//! b > c
//! ```
//!
//! A ballot line is an optional `<multiplicity>:` prefix followed by a strict
//! ranking, most preferred first. Partial rankings are allowed and express no
//! preference about unlisted candidates.
//!
//! Margin files are CSV with a header row of candidate names. Cell `(i, j)` is
//! the margin of candidate `i` over candidate `j`. Rows may carry a leading
//! label column, in which case the header starts with an empty cell.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};
use crate::{CandidateId, Rational};

const RESERVED: [char; 4] = [',', '>', ':', '#'];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub id: CandidateId,
    pub name: String,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.trim() == name && !name.chars().any(|c| RESERVED.contains(&c) || c.is_control())
}

fn make_candidates<S: AsRef<str>>(names: &[S]) -> Result<Vec<Candidate>> {
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(names.len());
    for (id, name) in names.iter().enumerate() {
        let name = name.as_ref();
        if !valid_name(name) {
            return Err(Error::InvalidProfile(format!("invalid candidate name {name:?}")));
        }
        if seen.insert(name.to_string(), id).is_some() {
            return Err(Error::InvalidProfile(format!("candidate {name:?} declared twice")));
        }
        out.push(Candidate { id, name: name.to_string() });
    }
    if out.is_empty() {
        return Err(Error::InvalidProfile("no candidates".into()));
    }
    Ok(out)
}

/// A strict, possibly partial, ranking cast `multiplicity` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ballot {
    pub ranking: Vec<CandidateId>,
    pub multiplicity: u64,
}

impl Ballot {
    pub fn new(ranking: Vec<CandidateId>, multiplicity: u64) -> Self {
        Ballot { ranking, multiplicity }
    }

    /// Position of `c` on the ballot, if ranked.
    pub fn position(&self, c: CandidateId) -> Option<usize> {
        self.ranking.iter().position(|&x| x == c)
    }

    /// True when the ballot ranks both candidates with `a` ahead of `b`.
    pub fn prefers(&self, a: CandidateId, b: CandidateId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(pa), Some(pb)) => pa < pb,
            _ => false,
        }
    }
}

/// A multiset of ranked ballots over a fixed candidate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    candidates: Vec<Candidate>,
    ballots: Vec<Ballot>,
}

impl Profile {
    /// Builds a profile, checking every ballot against the candidate list.
    pub fn new<S: AsRef<str>>(names: &[S], ballots: Vec<Ballot>) -> Result<Self> {
        let candidates = make_candidates(names)?;
        Self::from_parts(candidates, ballots)
    }

    pub(crate) fn from_parts(candidates: Vec<Candidate>, ballots: Vec<Ballot>) -> Result<Self> {
        let n = candidates.len();
        if ballots.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (i, ballot) in ballots.iter().enumerate() {
            if ballot.multiplicity == 0 {
                return Err(Error::InvalidProfile(format!("ballot {i} has multiplicity 0")));
            }
            if ballot.ranking.is_empty() || ballot.ranking.len() > n {
                return Err(Error::InvalidProfile(format!("ballot {i} ranks {} candidates", ballot.ranking.len())));
            }
            let mut seen = vec![false; n];
            for &c in &ballot.ranking {
                if c >= n {
                    return Err(Error::InvalidProfile(format!("ballot {i} names unknown id {c}")));
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(Error::InvalidProfile(format!("ballot {i} ranks id {c} twice")));
                }
            }
        }
        Ok(Profile { candidates, ballots })
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn names(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    /// Total number of voters, counting multiplicities.
    pub fn num_voters(&self) -> u64 {
        self.ballots.iter().map(|b| b.multiplicity).sum()
    }

    pub fn candidate_id(&self, name: &str) -> Option<CandidateId> {
        self.candidates.iter().position(|c| c.name == name)
    }

    pub fn is_complete(&self) -> bool {
        self.ballots.iter().all(|b| b.ranking.len() == self.candidates.len())
    }

    /// Identical rankings merged and sorted; two profiles describe the same
    /// electorate exactly when their canonical forms are equal.
    pub fn canonical(&self) -> Profile {
        let mut counts: HashMap<&[CandidateId], u64> = HashMap::new();
        for b in &self.ballots {
            *counts.entry(b.ranking.as_slice()).or_default() += b.multiplicity;
        }
        let mut ballots: Vec<Ballot> = counts.into_iter().map(|(r, k)| Ballot::new(r.to_vec(), k)).collect();
        ballots.sort();
        Profile { candidates: self.candidates.clone(), ballots }
    }

    /// One ballot entry per voter.
    pub fn expanded(&self) -> Profile {
        let ballots = self
            .ballots
            .iter()
            .flat_map(|b| (0..b.multiplicity).map(move |_| Ballot::new(b.ranking.clone(), 1)))
            .collect();
        Profile { candidates: self.candidates.clone(), ballots }
    }

    /// Pairwise win counts: `wins[a][b]` voters rank `a` ahead of `b`.
    pub fn pairwise_wins(&self) -> Vec<Vec<u64>> {
        let n = self.num_candidates();
        let mut wins = vec![vec![0u64; n]; n];
        for b in &self.ballots {
            for (i, &hi) in b.ranking.iter().enumerate() {
                for &lo in &b.ranking[i + 1..] {
                    wins[hi][lo] += b.multiplicity;
                }
            }
        }
        wins
    }

    /// Reads a profile in the ballot file format.
    pub fn parse(text: &str) -> Result<Profile> {
        parse_ballot_file(text)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "candidates: {}", self.names().join(", "))?;
        for b in &self.ballots {
            let names: Vec<&str> = b.ranking.iter().map(|&c| self.candidates[c].name.as_str()).collect();
            writeln!(f, "{}: {}", b.multiplicity, names.join(" > "))?;
        }
        Ok(())
    }
}

/// Parses the ballot file format. Errors carry 1-based line numbers.
pub fn parse_ballot_file(text: &str) -> Result<Profile> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::parse(1, ParseErrorKind::Empty))?;
    let rest = header.strip_prefix("candidates:").ok_or(Error::parse(header_line, ParseErrorKind::MissingHeader))?;
    let mut index: HashMap<&str, CandidateId> = HashMap::new();
    let mut candidates = Vec::new();
    for name in rest.split(',').map(str::trim) {
        if !valid_name(name) {
            return Err(Error::parse(header_line, ParseErrorKind::InvalidName(name.into())));
        }
        if index.insert(name, candidates.len()).is_some() {
            return Err(Error::parse(header_line, ParseErrorKind::DuplicateDeclaration(name.into())));
        }
        candidates.push(Candidate { id: candidates.len(), name: name.to_string() });
    }

    let mut ballots = Vec::new();
    let mut last_line = header_line;
    for (line, text) in lines {
        last_line = line;
        let (multiplicity, ranking) = match text.split_once(':') {
            Some((k, r)) => {
                let k = k.trim();
                let m = k
                    .parse::<u64>()
                    .ok()
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| Error::parse(line, ParseErrorKind::BadMultiplicity(k.into())))?;
                (m, r.trim())
            }
            None => (1, text),
        };
        if ranking.is_empty() {
            return Err(Error::parse(line, ParseErrorKind::EmptyRanking));
        }
        let mut seen = vec![false; candidates.len()];
        let mut ids = Vec::new();
        for name in ranking.split('>').map(str::trim) {
            let &id =
                index.get(name).ok_or_else(|| Error::parse(line, ParseErrorKind::UnknownCandidate(name.into())))?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::parse(line, ParseErrorKind::DuplicateInRanking(name.into())));
            }
            ids.push(id);
        }
        ballots.push(Ballot::new(ids, multiplicity));
    }
    if ballots.is_empty() {
        return Err(Error::parse(last_line + 1, ParseErrorKind::NoBallots));
    }
    Ok(Profile { candidates, ballots })
}

/// Pairwise victory margins with an optional self-loop diagonal.
///
/// Off-diagonal entries are exact integers and at most one of `(a, b)` and
/// `(b, a)` is nonzero. The diagonal, once applied, holds exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginMatrix {
    candidates: Vec<Candidate>,
    off: Vec<u64>,
    diagonal: Option<Vec<Rational>>,
    degenerate: bool,
}

impl MarginMatrix {
    /// Builds a matrix from square rows of margins. The diagonal must be zero.
    pub fn from_rows<S: AsRef<str>>(names: &[S], rows: &[Vec<u64>]) -> Result<Self> {
        let candidates = make_candidates(names)?;
        let n = candidates.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMargins(format!("expected a {n}x{n} matrix")));
        }
        let off: Vec<u64> = rows.iter().flatten().copied().collect();
        let m = MarginMatrix { candidates, off, diagonal: None, degenerate: false };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let n = self.n();
        for a in 0..n {
            if self.off[a * n + a] != 0 {
                return Err(Error::InvalidMargins(format!("nonzero diagonal for {:?}", self.candidates[a].name)));
            }
            for b in a + 1..n {
                if self.off[a * n + b] > 0 && self.off[b * n + a] > 0 {
                    return Err(Error::InvalidMargins(format!(
                        "conflicting margins between {:?} and {:?}",
                        self.candidates[a].name, self.candidates[b].name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn names(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn candidate_id(&self, name: &str) -> Option<CandidateId> {
        self.candidates.iter().position(|c| c.name == name)
    }

    /// Margin by which `a` beats `b`; zero on the diagonal, on ties and when
    /// `a` loses.
    pub fn margin(&self, a: CandidateId, b: CandidateId) -> u64 {
        self.off[a * self.n() + b]
    }

    pub fn beats(&self, a: CandidateId, b: CandidateId) -> bool {
        a != b && self.margin(a, b) > 0
    }

    pub fn has_diagonal(&self) -> bool {
        self.diagonal.is_some()
    }

    pub fn diagonal(&self) -> Option<&[Rational]> {
        self.diagonal.as_deref()
    }

    /// Entry `(a, b)` including the self-loop diagonal, as an exact rational.
    pub fn entry(&self, a: CandidateId, b: CandidateId) -> Rational {
        match (&self.diagonal, a == b) {
            (Some(d), true) => d[a],
            (None, true) => Rational::zero(),
            _ => Rational::from_integer(self.margin(a, b) as i128),
        }
    }

    /// True when self-loops were applied to a profile with no strict
    /// pairwise outcome at all (total win margin zero).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub(crate) fn with_diagonal(&self, diagonal: Vec<Rational>, degenerate: bool) -> Self {
        MarginMatrix {
            candidates: self.candidates.clone(),
            off: self.off.clone(),
            diagonal: Some(diagonal),
            degenerate,
        }
    }

    pub fn without_diagonal(&self) -> Self {
        MarginMatrix { candidates: self.candidates.clone(), off: self.off.clone(), diagonal: None, degenerate: false }
    }

    /// Relabels candidates: old candidate `i` becomes candidate `perm[i]`.
    pub fn permuted(&self, perm: &[CandidateId]) -> Self {
        let n = self.n();
        let mut names = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            names[new] = self.candidates[old].name.clone();
        }
        let mut off = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                off[perm[a] * n + perm[b]] = self.off[a * n + b];
            }
        }
        let diagonal = self.diagonal.as_ref().map(|d| {
            let mut out = vec![Rational::zero(); n];
            for (old, &new) in perm.iter().enumerate() {
                out[new] = d[old];
            }
            out
        });
        MarginMatrix {
            candidates: names.into_iter().enumerate().map(|(id, name)| Candidate { id, name }).collect(),
            off,
            diagonal,
            degenerate: self.degenerate,
        }
    }

    /// Whether the undirected margin graph (edge wherever a strict pairwise
    /// outcome exists) is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if !seen[b] && (self.beats(a, b) || self.beats(b, a)) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Writes the off-diagonal margins as labelled CSV.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        out.push(',');
        out.push_str(&self.names().join(","));
        out.push('\n');
        for a in 0..n {
            out.push_str(&self.candidates[a].name);
            for b in 0..n {
                out.push(',');
                out.push_str(&self.margin(a, b).to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a square margin CSV. Row labels are optional; when present the
/// header must begin with an empty cell.
pub fn parse_margin_csv(text: &str) -> Result<MarginMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or(Error::parse(1, ParseErrorKind::Empty))?;
    let mut cells: Vec<&str> = header.split(',').map(str::trim).collect();
    let labelled = cells.first() == Some(&"");
    if labelled {
        cells.remove(0);
    }
    let mut seen = HashMap::new();
    for (i, name) in cells.iter().enumerate() {
        if !valid_name(name) {
            return Err(Error::parse(header_line, ParseErrorKind::InvalidName((*name).into())));
        }
        if seen.insert(*name, i).is_some() {
            return Err(Error::parse(header_line, ParseErrorKind::DuplicateDeclaration((*name).into())));
        }
    }
    let n = cells.len();
    let mut off = vec![0u64; n * n];
    let mut row = 0;
    let mut last_line = header_line;
    for (line, text) in lines {
        last_line = line;
        if row == n {
            return Err(Error::parse(line, ParseErrorKind::NotSquare { expected: n, found: row + 1 }));
        }
        let mut values: Vec<&str> = text.split(',').map(str::trim).collect();
        if labelled {
            let label = values.remove(0);
            if label != cells[row] {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::RowLabel { expected: cells[row].into(), found: label.into() },
                ));
            }
        }
        if values.len() != n {
            return Err(Error::parse(line, ParseErrorKind::RowLength { expected: n, found: values.len() }));
        }
        for (col, v) in values.iter().enumerate() {
            let x: u64 = v.parse().map_err(|_| Error::parse(line, ParseErrorKind::BadCell((*v).into())))?;
            if col == row && x != 0 {
                return Err(Error::parse(line, ParseErrorKind::NonzeroDiagonal(cells[row].into())));
            }
            if col < row && x > 0 && off[col * n + row] > 0 {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::ConflictingMargins(cells[row].into(), cells[col].into()),
                ));
            }
            off[row * n + col] = x;
        }
        row += 1;
    }
    if row != n {
        return Err(Error::parse(last_line + 1, ParseErrorKind::NotSquare { expected: n, found: row }));
    }
    let candidates = cells.into_iter().enumerate().map(|(id, name)| Candidate { id, name: name.to_string() }).collect();
    Ok(MarginMatrix { candidates, off, diagonal: None, degenerate: false })
}

/// Pairwise margins of a profile. A ballot expresses `a > b` only when it
/// ranks both; exact ties leave both entries zero.
pub fn profile_to_margins(profile: &Profile) -> MarginMatrix {
    let n = profile.num_candidates();
    let wins = profile.pairwise_wins();
    let mut off = vec![0u64; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                off[a * n + b] = wins[a][b].saturating_sub(wins[b][a]);
            }
        }
    }
    MarginMatrix { candidates: profile.candidates.clone(), off, diagonal: None, degenerate: false }
}

impl From<&Profile> for MarginMatrix {
    fn from(p: &Profile) -> Self {
        profile_to_margins(p)
    }
}
