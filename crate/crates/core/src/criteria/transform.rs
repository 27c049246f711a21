//! Profile modifications used by the criteria definitions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{Ballot, Profile};
use crate::CandidateId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileTransform {
    /// Splits the profile into one ballot per voter and shuffles them.
    PermuteVoters {
        seed: u64,
    },
    /// Exchanges `a` and `b` on every ballot; names stay put.
    SwapCandidates {
        a: CandidateId,
        b: CandidateId,
    },
    /// Moves `candidate` up `steps` places on `count` copies of ballot entry
    /// `ballot`, stopping at the top.
    RaiseCandidate {
        candidate: CandidateId,
        ballot: usize,
        count: u64,
        steps: usize,
    },
    /// On `count` copies of ballot entry `ballot`, keeps the first `keep`
    /// names and appends `tail`.
    TruncateExtend {
        ballot: usize,
        count: u64,
        keep: usize,
        tail: Vec<CandidateId>,
    },
    AddBallots {
        ballots: Vec<Ballot>,
    },
    /// Adds a new candidate `name` ranked directly above `candidate` on every
    /// ballot that ranks `candidate`. The clone gets the next free id.
    CloneCandidate {
        candidate: CandidateId,
        name: String,
    },
}

impl ProfileTransform {
    pub fn apply(&self, profile: &Profile) -> Result<Profile> {
        let names = profile.names();
        let n = names.len();
        let check = |c: CandidateId| {
            if c < n {
                Ok(())
            } else {
                Err(Error::InvalidProfile(format!("no candidate with id {c}")))
            }
        };
        match self {
            ProfileTransform::PermuteVoters { seed } => {
                let mut ballots = profile.expanded().ballots().to_vec();
                ballots.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                Profile::new(&names, ballots)
            }
            ProfileTransform::SwapCandidates { a, b } => {
                check(*a)?;
                check(*b)?;
                let swap = |c: CandidateId| {
                    if c == *a {
                        *b
                    } else if c == *b {
                        *a
                    } else {
                        c
                    }
                };
                let ballots = profile
                    .ballots()
                    .iter()
                    .map(|bal| Ballot::new(bal.ranking.iter().map(|&c| swap(c)).collect(), bal.multiplicity))
                    .collect();
                Profile::new(&names, ballots)
            }
            ProfileTransform::RaiseCandidate { candidate, ballot, count, steps } => {
                check(*candidate)?;
                split_edit(profile, *ballot, *count, |ranking| {
                    let pos = ranking.iter().position(|c| c == candidate).ok_or_else(|| {
                        Error::InvalidProfile(format!("ballot {ballot} does not rank candidate {candidate}"))
                    })?;
                    let c = ranking.remove(pos);
                    ranking.insert(pos.saturating_sub(*steps), c);
                    Ok(())
                })
            }
            ProfileTransform::TruncateExtend { ballot, count, keep, tail } => {
                for &c in tail {
                    check(c)?;
                }
                split_edit(profile, *ballot, *count, |ranking| {
                    ranking.truncate(*keep);
                    ranking.extend_from_slice(tail);
                    Ok(())
                })
            }
            ProfileTransform::AddBallots { ballots } => {
                let mut all = profile.ballots().to_vec();
                all.extend(ballots.iter().cloned());
                Profile::new(&names, all)
            }
            ProfileTransform::CloneCandidate { candidate, name } => {
                check(*candidate)?;
                let clone = n;
                let mut new_names: Vec<&str> = names.clone();
                new_names.push(name);
                let ballots = profile
                    .ballots()
                    .iter()
                    .map(|bal| {
                        let mut ranking = Vec::with_capacity(bal.ranking.len() + 1);
                        for &c in &bal.ranking {
                            if c == *candidate {
                                ranking.push(clone);
                            }
                            ranking.push(c);
                        }
                        Ballot::new(ranking, bal.multiplicity)
                    })
                    .collect();
                Profile::new(&new_names, ballots)
            }
        }
    }
}

/// Applies `edit` to `count` copies of ballot entry `index`. Remaining copies
/// stay in place; the edited copies are appended.
fn split_edit(
    profile: &Profile,
    index: usize,
    count: u64,
    edit: impl FnOnce(&mut Vec<CandidateId>) -> Result<()>,
) -> Result<Profile> {
    let mut ballots = profile.ballots().to_vec();
    let entry = ballots.get(index).ok_or_else(|| Error::InvalidProfile(format!("no ballot entry {index}")))?;
    if count == 0 || count > entry.multiplicity {
        return Err(Error::InvalidProfile(format!(
            "cannot edit {count} of the {} copies of ballot {index}",
            entry.multiplicity
        )));
    }
    let mut ranking = entry.ranking.clone();
    edit(&mut ranking)?;
    let edited = Ballot::new(ranking, count);
    if count == entry.multiplicity {
        ballots[index] = edited;
    } else {
        ballots[index].multiplicity -= count;
        ballots.push(edited);
    }
    Profile::new(&profile.names(), ballots)
}

/// Whether two profiles hold the same multiset of ballots, matching
/// candidates by name rather than id.
pub fn same_electorate(p: &Profile, q: &Profile) -> bool {
    let mut pn = p.names();
    let mut qn = q.names();
    pn.sort_unstable();
    qn.sort_unstable();
    if pn != qn {
        return false;
    }
    let relabel: Vec<CandidateId> = p.names().iter().map(|name| q.candidate_id(name).expect("same name set")).collect();
    let ballots = p
        .ballots()
        .iter()
        .map(|b| Ballot::new(b.ranking.iter().map(|&c| relabel[c]).collect(), b.multiplicity))
        .collect();
    let mapped = Profile::new(&q.names(), ballots).expect("relabelled profile is valid");
    mapped.canonical() == q.canonical()
}
