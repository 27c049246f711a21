use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid margin matrix: {0}")]
    InvalidMargins(String),

    #[error("transition matrix is not column-stochastic: column {column} sums to {sum}")]
    NotStochastic { column: usize, sum: f64 },

    #[error("invalid damping configuration: {0}")]
    InvalidConfig(String),

    #[error("linear system is singular or ill-conditioned at d = {0}")]
    Singular(f64),

    #[error("{method} requires complete ballots; ballot {ballot} ranks {ranked} of {candidates} candidates")]
    PartialBallot { method: &'static str, ballot: usize, ranked: usize, candidates: usize },

    #[error("{0} needs ballots, not a margin matrix")]
    NeedsBallots(&'static str),

    #[error("empty profile")]
    EmptyProfile,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty input")]
    Empty,
    #[error("expected `candidates:` header")]
    MissingHeader,
    #[error("invalid candidate name {0:?}")]
    InvalidName(String),
    #[error("candidate {0:?} declared twice")]
    DuplicateDeclaration(String),
    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),
    #[error("candidate {0:?} appears twice in one ranking")]
    DuplicateInRanking(String),
    #[error("invalid multiplicity {0:?}")]
    BadMultiplicity(String),
    #[error("no ballots")]
    NoBallots,
    #[error("empty ranking")]
    EmptyRanking,
    #[error("expected {expected} cells, found {found}")]
    RowLength { expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    NotSquare { expected: usize, found: usize },
    #[error("invalid cell {0:?}: margins are nonnegative integers")]
    BadCell(String),
    #[error("row label {found:?} does not match header {expected:?}")]
    RowLabel { expected: String, found: String },
    #[error("nonzero diagonal for {0:?}")]
    NonzeroDiagonal(String),
    #[error("conflicting margins between {0:?} and {1:?}")]
    ConflictingMargins(String, String),
}

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }
}
