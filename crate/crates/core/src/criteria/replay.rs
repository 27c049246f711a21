use super::{same_electorate, Criterion, CriterionOutcome, ProfileTransform, Verdict, Witness, WitnessSide};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::margins::TransitionKind;
use crate::profile::{Ballot, Profile};
use crate::rank::{ballotrank, BallotRankOutcome, DampingConfig, Election};

/// Tolerance for published four-decimal scores.
const SCORE_TOLERANCE: f64 = 5e-4;

/// Expected BallotRank output for one fixture at one damping value.
struct Expect {
    fixture: &'static str,
    d: f64,
    scores: &'static [(&'static str, f64)],
    ranking: Option<&'static str>,
    winner: Option<&'static str>,
}

struct Case {
    before: &'static str,
    after: &'static str,
    /// Damping used for the witness.
    d: f64,
    expect: Vec<Expect>,
    note: &'static str,
}

fn fixture(name: &str) -> Profile {
    fixtures::ballot_fixtures()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, p)| p)
        .unwrap_or_else(|| panic!("no fixture {name}"))
}

// 0.3183 is a published score, not an approximation of 1/π
#[allow(clippy::approx_constant)]
fn case(criterion: Criterion) -> Case {
    let e = |fixture, d, scores, ranking, winner| Expect { fixture, d, scores, ranking, winner };
    match criterion {
        Criterion::Iia => Case {
            before: "toy",
            after: "iia2",
            d: 0.85,
            expect: vec![
                e(
                    "toy",
                    0.85,
                    &[("a", 0.8469), ("b", 0.0756), ("c", 0.0375), ("d", 0.0400)],
                    Some("a > b > d > c"),
                    None,
                ),
                e("toy", 1.0, &[("a", 1.0), ("b", 0.0), ("c", 0.0), ("d", 0.0)], None, Some("a")),
                e(
                    "iia2",
                    0.85,
                    &[("a", 0.3086), ("b", 0.3113), ("c", 0.3426), ("d", 0.0375)],
                    Some("c > b > a > d"),
                    None,
                ),
                e("iia2", 1.0, &[("a", 0.3183), ("b", 0.3236), ("c", 0.3581), ("d", 0.0)], Some("c > b > a > d"), None),
            ],
            note: "the same voters prefer a to b in both profiles, yet a and b swap places",
        },
        Criterion::Monotonicity => Case {
            before: "mono1",
            after: "mono2",
            d: 0.85,
            expect: vec![
                e(
                    "mono1",
                    0.85,
                    &[("a", 0.2763), ("b", 0.1612), ("c", 0.2513), ("d", 0.3112)],
                    Some("d > a > c > b"),
                    None,
                ),
                e(
                    "mono2",
                    0.85,
                    &[("a", 0.2677), ("b", 0.2738), ("c", 0.1551), ("d", 0.3034)],
                    Some("d > b > a > c"),
                    None,
                ),
            ],
            note: "a is raised on two ballots and falls from second to third",
        },
        Criterion::LaterNoHarm => Case {
            before: "lnh1",
            after: "lnh2",
            d: 1.0,
            expect: vec![
                e("lnh1", 1.0, &[("a", 0.387), ("b", 0.290), ("c", 0.323)], None, Some("a")),
                e("lnh2", 1.0, &[], None, Some("c")),
                e("lnh2", 0.85, &[], Some("c > a > b"), None),
            ],
            note: "a voter ranking c > a adds b below a, and a loses the lead to c",
        },
        Criterion::NoShow => Case {
            before: "noshow1",
            after: "noshow2",
            d: 0.85,
            expect: vec![
                e("noshow1", 0.85, &[], None, Some("a")),
                e("noshow2", 0.3, &[], Some("b > a > c"), None),
                e("noshow2", 0.5, &[], Some("b > a > c"), None),
                e("noshow2", 0.85, &[], Some("b > a > c"), None),
                e("noshow2", 0.99, &[], Some("b > a > c"), None),
            ],
            note: "two extra ballots ranking a above b make b the winner",
        },
        Criterion::Cloning => Case {
            before: "clone1",
            after: "clone2",
            d: 1.0,
            expect: vec![
                e("clone1", 1.0, &[("a", 0.2669), ("b", 0.2641)], None, Some("a")),
                e("clone2", 1.0, &[("b", 0.2369), ("a'", 0.2220), ("a", 0.1182)], None, Some("b")),
            ],
            note: "cloning the winner a hands the win to b",
        },
        _ => unreachable!("positive criteria have no fixture"),
    }
}

/// Checks that the second fixture really is the first one modified the way
/// the criterion describes.
fn structural_diff(criterion: Criterion, before: &Profile, after: &Profile) -> Vec<String> {
    let transforms: Vec<ProfileTransform> = match criterion {
        Criterion::Iia => {
            let (a, b) = (0, 1);
            let (x, y) = (before.pairwise_wins(), after.pairwise_wins());
            return if (x[a][b], x[b][a]) == (y[a][b], y[b][a]) {
                Vec::new()
            } else {
                vec![format!("a-vs-b split differs: {}:{} vs {}:{}", x[a][b], x[b][a], y[a][b], y[b][a])]
            };
        }
        Criterion::Monotonicity => vec![
            ProfileTransform::RaiseCandidate { candidate: 0, ballot: 6, count: 1, steps: 1 },
            ProfileTransform::RaiseCandidate { candidate: 0, ballot: 2, count: 1, steps: 1 },
        ],
        Criterion::LaterNoHarm => {
            vec![ProfileTransform::TruncateExtend { ballot: 3, count: 1, keep: 2, tail: vec![1] }]
        }
        Criterion::NoShow => vec![ProfileTransform::AddBallots { ballots: vec![Ballot::new(vec![2, 0, 1], 2)] }],
        Criterion::Cloning => vec![ProfileTransform::CloneCandidate { candidate: 0, name: "a'".into() }],
        _ => return Vec::new(),
    };
    let mut p = before.clone();
    for t in &transforms {
        match t.apply(&p) {
            Ok(q) => p = q,
            Err(e) => return vec![format!("transform {t:?} failed: {e}")],
        }
    }
    if same_electorate(&p, after) {
        Vec::new()
    } else {
        vec![format!("second profile is not the first modified by {transforms:?}")]
    }
}

fn run_fixture(profile: &Profile, d: f64) -> Result<BallotRankOutcome> {
    ballotrank(&Election::Ballots(profile.clone()), &DampingConfig::with_damping(d), TransitionKind::SelfLoops)
}

fn side(profile: &Profile, out: &BallotRankOutcome) -> WitnessSide {
    WitnessSide {
        profile: profile.to_string(),
        damping: Some(out.config.d),
        scores: Some(out.scores.scores.clone()),
        ranking: out.ranking.display(&profile.names()),
    }
}

/// Runs BallotRank on the counterexample pair for a failed criterion and
/// compares against the published scores and rankings.
pub fn replay_counterexample(criterion: Criterion) -> Result<CriterionOutcome> {
    if criterion.is_positive() {
        return Err(Error::InvalidConfig(format!("{criterion} has no counterexample fixture")));
    }
    let case = case(criterion);
    let (before, after) = (fixture(case.before), fixture(case.after));
    let mut diff = structural_diff(criterion, &before, &after);

    for ex in &case.expect {
        let profile = fixture(ex.fixture);
        let names = profile.names();
        let out = run_fixture(&profile, ex.d)?;
        let label = format!("{} d={}", ex.fixture, ex.d);
        for &(name, want) in ex.scores {
            let c = profile.candidate_id(name).expect("fixture candidate");
            let got = out.scores.scores[c];
            if (got - want).abs() > SCORE_TOLERANCE {
                diff.push(format!("{label} score {name}: expected {want}, got {got:.6}"));
            }
        }
        if let Some(want) = ex.ranking {
            let got = out.ranking.display(&names);
            if got != want {
                diff.push(format!("{label} ranking: expected {want}, got {got}"));
            }
        }
        if let Some(want) = ex.winner {
            let got: Vec<&str> = out.ranking.winners().iter().map(|&c| names[c]).collect();
            if got != [want] {
                diff.push(format!("{label} winner: expected {want}, got {}", got.join(" ~ ")));
            }
        }
    }

    let witness = if diff.is_empty() {
        let b = run_fixture(&before, case.d)?;
        let a = run_fixture(&after, case.d)?;
        Some(Witness { before: side(&before, &b), after: Some(side(&after, &a)), note: case.note.into() })
    } else {
        None
    };
    Ok(CriterionOutcome {
        criterion,
        verdict: if diff.is_empty() { Verdict::FixtureReproduced } else { Verdict::FixtureMismatch },
        witness,
        trials: 0,
        violations: usize::from(diff.is_empty()),
        report_only: false,
        method: "ballotrank".into(),
        damping: Some(case.d),
        seed: None,
        diff,
    })
}
