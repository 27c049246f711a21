//! Ranked-ballot tabulation built around BallotRank, a margin-weighted
//! PageRank with self-loops.
//!
//! The pipeline is:
//!
//! 1. [`profile`]: parse ballots or a precomputed margin matrix.
//! 2. [`margins`]: aggregate win/loss margins, add the self-loop diagonal and
//!    column-normalize into a [`margins::TransitionMatrix`].
//! 3. [`rank`]: find the stationary vector by power iteration (any damping in
//!    `(0, 1]`) or by a direct linear solve (damping `< 1`).
//!
//! [`condorcet`] reports Condorcet winners, losers and the Smith set,
//! [`rivals`] implements the comparison methods (minimax, ranked pairs,
//! Schulze, instant runoff, convergence voting) and [`criteria`] replays
//! known counterexamples and fuzzes the social-choice properties.
//!
//! ```
//! use ballotrank::{fixtures, rank};
//!
//! let profile = fixtures::toy();
//! let outcome = rank::ballotrank(
//!     &profile.clone().into(),
//!     &rank::DampingConfig::default(),
//!     ballotrank::margins::TransitionKind::SelfLoops,
//! )
//! .unwrap();
//! assert_eq!(outcome.ranking.groups[0], vec![0]);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod condorcet;
pub mod criteria;
pub mod error;
pub mod fixtures;
pub mod margins;
pub mod profile;
pub mod rank;
pub mod rivals;

pub use error::{Error, Result};

/// Index of a candidate within an election, `0..n`.
pub type CandidateId = usize;

/// Exact rational used for self-loop diagonals and golden-value checks.
pub type Rational = num_rational::Ratio<i128>;
