//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#![allow(clippy::approx_constant, clippy::type_complexity)]

use std::process::ExitCode;
use std::time::Instant;

use ballotrank::criteria::{check_positive, random_profile, replay_counterexample, CheckConfig, Criterion, Verdict};
use ballotrank::margins::{apply_self_loops, exact_transition, normalize, transition_for, TransitionKind};
use ballotrank::profile::{profile_to_margins, MarginMatrix, Profile};
use ballotrank::rank::{ballotrank, damping_grid, direct_solve, power_method, DampingConfig, Election};
use ballotrank::rivals::{run, Method, RunOptions};
use ballotrank::{fixtures, CandidateId, Rational};
use num_traits::ToPrimitive;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol)
}

fn scores(input: Election, d: f64) -> Vec<f64> {
    ballotrank(&input, &DampingConfig::with_damping(d), TransitionKind::SelfLoops).unwrap().scores.scores
}

fn winner_names(input: &Election, method: Method, d: Option<f64>) -> Vec<String> {
    let r = run(method, input, &RunOptions { damping: d, ..Default::default() }).unwrap();
    let names = input.names();
    r.winners().iter().map(|&c| names[c].clone()).collect()
}

fn toy_golden() -> Check {
    let toy = fixtures::toy();
    let out = ballotrank(&toy.clone().into(), &DampingConfig::with_damping(0.85), TransitionKind::SelfLoops).unwrap();
    let want = [0.8469, 0.0756, 0.0375, 0.0400];
    ensure(close(&out.scores.scores, &want, 5e-4), || format!("d=0.85 scores {:?}", out.scores.scores))?;
    let ranking = out.ranking.display(&toy.names());
    ensure(ranking == "a > b > d > c", || format!("ranking {ranking}"))?;
    let s1 = scores(toy.into(), 1.0);
    ensure(close(&s1, &[1.0, 0.0, 0.0, 0.0], 1e-9), || format!("d=1 scores {s1:?}"))?;
    Ok(format!("d=0.85 {:.4?}; d=1 {:.4?}", out.scores.scores, s1))
}

fn toy_exact() -> Check {
    let m = apply_self_loops(&profile_to_margins(&fixtures::toy()));
    let r = |a, b| Rational::new(a, b);
    let diag = m.diagonal().unwrap();
    ensure(diag == [r(14, 27), r(4, 9), r(0, 1), r(1, 27)], || format!("diagonal {diag:?}"))?;
    let l = exact_transition(&m, TransitionKind::SelfLoops);
    // (row, column, value) with a=0, b=1, c=2, d=3
    let entries = [
        (0, 1, r(9, 10)),
        (1, 1, r(1, 10)),
        (0, 2, r(6, 13)),
        (1, 2, r(6, 13)),
        (3, 2, r(1, 13)),
        (0, 3, r(324, 649)),
        (1, 3, r(324, 649)),
        (3, 3, r(1, 649)),
        (0, 0, r(1, 1)),
    ];
    for (a, b, want) in entries {
        ensure(l[a][b] == want, || format!("l[{a}][{b}] = {} not {want}", l[a][b]))?;
    }
    Ok("diagonal 14/27, 4/9, 0, 1/27 and all listed entries exact".into())
}

fn minneapolis() -> Check {
    let m = fixtures::minneapolis();
    let dm = apply_self_loops(&m);
    let diag: Vec<f64> = dm.diagonal().unwrap().iter().map(|x| x.to_f64().unwrap()).collect();
    ensure(close(&diag, &[0.280, 0.349, 0.258, 0.0, 0.112], 1e-3), || format!("diagonal {diag:?}"))?;
    let t = normalize(&dm, TransitionKind::SelfLoops);
    let loops: Vec<f64> = (0..5).map(|c| t.entry(c, c)).collect();
    ensure(close(&loops, &[0.001, 0.022, 0.004, 0.0, 1.5e-5], 1e-3), || format!("self-loops {loops:?}"))?;
    let arab = m.candidate_id("Arab").unwrap();
    let grid = damping_grid(0.05, 0.95, 0.05).unwrap();
    for &d in &grid {
        let s = scores(m.clone().into(), d);
        let best = argmax(&s);
        ensure(best == arab, || format!("d={d}: winner {} ({s:?})", m.names()[best]))?;
    }
    Ok(format!("diagonal {diag:.3?}; self-loops {loops:.5?}; Arab wins at {} damping values", grid.len()))
}

fn argmax(s: &[f64]) -> CandidateId {
    (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap()
}

fn oakland() -> Check {
    let m = fixtures::oakland();
    let dm = apply_self_loops(&m);
    let diag: Vec<f64> = dm.diagonal().unwrap().iter().map(|x| x.to_f64().unwrap()).collect();
    ensure(close(&diag, &[0.331, 0.618, 0.051], 1e-3), || format!("diagonal {diag:?}"))?;
    let (_, t) = transition_for(&m, TransitionKind::SelfLoops);
    // H=0, R=1, M=2; entry (a, b) is the flow from b to a
    let got = [t.entry(2, 0), t.entry(0, 1), t.entry(1, 2), t.entry(0, 0), t.entry(1, 1), t.entry(2, 2)];
    ensure(close(&got, &[0.993, 0.998, 0.999, 0.007, 0.002, 9.2e-5], 1e-3), || format!("entries {got:?}"))?;
    let mut grid = damping_grid(0.05, 1.0, 0.05).unwrap();
    grid.extend([0.001, 0.999]);
    for &d in &grid {
        let s = scores(m.clone().into(), d);
        ensure(argmax(&s) == 0, || format!("d={d}: scores {s:?}"))?;
    }
    Ok(format!("diagonal {diag:.3?}; entries {got:.5?}; Hutchinson wins at {} damping values", grid.len()))
}

fn replays() -> Check {
    // Published values, checked here independently of the replay tables.
    let cases: [(Profile, f64, &[f64]); 7] = [
        (fixtures::iia2(), 0.85, &[0.3086, 0.3113, 0.3426, 0.0375]),
        (fixtures::iia2(), 1.0, &[0.3183, 0.3236, 0.3581, 0.0]),
        (fixtures::mono1(), 0.85, &[0.2763, 0.1612, 0.2513, 0.3112]),
        (fixtures::mono2(), 0.85, &[0.2677, 0.2738, 0.1551, 0.3034]),
        (fixtures::lnh1(), 1.0, &[0.387, 0.290, 0.323]),
        (fixtures::clone1(), 1.0, &[0.2669, 0.2641]),
        (fixtures::clone2(), 1.0, &[0.1182, 0.2220, 0.2369]),
    ];
    for (p, d, want) in cases {
        let s = scores(p.into(), d);
        ensure(close(&s[..want.len()], want, 5e-4), || format!("d={d}: {s:?} vs {want:?}"))?;
    }
    for d in [0.3, 0.5, 0.85, 0.99] {
        let s = scores(fixtures::noshow2().into(), d);
        ensure(argmax(&s) == 1, || format!("no-show d={d}: {s:?}"))?;
    }
    let mut verdicts = Vec::new();
    for c in Criterion::REPLAY {
        let out = replay_counterexample(c).unwrap();
        ensure(out.verdict == Verdict::FixtureReproduced, || format!("{c}: {:?}", out.diff))?;
        verdicts.push(c.as_str());
    }
    Ok(format!("reproduced: {}", verdicts.join(", ")))
}

fn comparison_table() -> Check {
    let mut issues = Vec::new();
    let mut seen = Vec::new();
    for (label, m, want) in
        [("Oakland", fixtures::oakland(), "Hutchinson"), ("Minneapolis", fixtures::minneapolis(), "Worlobah")]
    {
        let e: Election = m.into();
        for method in [Method::Minimax, Method::RankedPairs, Method::Schulze] {
            let w = winner_names(&e, method, None);
            seen.push(format!("{label}/{method}: {}", w.join("~")));
            if w != [want] {
                issues.push(format!("{label} {method} winner {} (expected {want})", w.join("~")));
            }
        }
        seen.push(format!("{label}/ballotrank: {}", winner_names(&e, Method::BallotRank, None).join("~")));
    }
    let e: Election = fixtures::minneapolis().into();
    let br = winner_names(&e, Method::BallotRank, None);
    let rp = winner_names(&e, Method::RankedPairs, None);
    if br == rp {
        issues.push(format!("BallotRank agrees with ranked pairs on Minneapolis ({})", br.join("~")));
    }
    if issues.is_empty() {
        Ok(seen.join("; "))
    } else {
        Err(format!("{} | observed {}", issues.join("; "), seen.join("; ")))
    }
}

/// Condorcet winner by direct pairwise counting over the ballots.
fn condorcet_winner(p: &Profile) -> Option<CandidateId> {
    let n = p.num_candidates();
    let mut pos = vec![0usize; n];
    let mut wins = vec![vec![0u64; n]; n];
    for b in p.ballots() {
        for (i, &c) in b.ranking.iter().enumerate() {
            pos[c] = i;
        }
        for a in 0..n {
            for c in 0..n {
                if pos[a] < pos[c] {
                    wins[a][c] += b.multiplicity;
                }
            }
        }
    }
    (0..n).find(|&a| (0..n).all(|c| c == a || wins[a][c] > wins[c][a]))
}

fn condorcet_identification() -> Check {
    let mut profiles = Vec::new();
    let mut seed = 0u64;
    while profiles.len() < 1000 {
        seed += 1;
        let n = 2 + (seed % 6) as usize;
        let voters = 3 + 2 * (seed * 7919 % 49) as usize;
        let p = random_profile(n, voters, seed);
        if let Some(w) = condorcet_winner(&p) {
            profiles.push((p, w));
        }
    }
    let mut report = Vec::new();
    let mut undamped_misses = 0;
    for d in [0.5, 0.85, 0.999, 1.0] {
        let misses = profiles
            .iter()
            .filter(|(p, w)| {
                let out =
                    ballotrank(&p.clone().into(), &DampingConfig::with_damping(d), TransitionKind::SelfLoops).unwrap();
                out.ranking.winners() != [*w]
            })
            .count();
        if d == 1.0 {
            undamped_misses = misses;
        }
        report.push(format!("d={d}: {}/1000", 1000 - misses));
    }
    let summary = format!("{} seeds tried; {}", seed, report.join(", "));
    ensure(undamped_misses == 0, || summary.clone())?;
    Ok(summary)
}

fn solver_agreement() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let n = 2 + (seed % 6) as usize;
        let p = random_profile(n, 3 + 2 * (seed % 20) as usize, 10_000 + seed);
        let (_, t) = transition_for(&profile_to_margins(&p), TransitionKind::SelfLoops);
        for d in [0.3, 0.85, 0.99] {
            let a = power_method(&t, &DampingConfig::with_damping(d)).unwrap();
            let b = direct_solve(&t, d).unwrap();
            let gap: f64 = a.scores.iter().zip(&b.scores).map(|(x, y)| (x - y).abs()).sum();
            worst = worst.max(gap);
        }
    }
    ensure(worst < 1e-9, || format!("worst L1 gap {worst:e}"))?;
    Ok(format!("worst L1 gap {worst:.2e} over 600 solves"))
}

fn property_suites() -> Check {
    let runs = [
        (Criterion::Anonymity, Some(0.85)),
        (Criterion::Anonymity, Some(1.0)),
        (Criterion::Neutrality, Some(0.85)),
        (Criterion::Neutrality, Some(1.0)),
        (Criterion::CondorcetLoser, Some(0.85)),
        (Criterion::CondorcetLoser, Some(1.0)),
        (Criterion::Pareto, Some(0.85)),
        (Criterion::Pareto, Some(1.0)),
        (Criterion::Smith, Some(1.0)),
    ];
    let mut lines = Vec::new();
    for (c, d) in runs {
        let cfg = CheckConfig { damping: d, trials: 300, seed: 2024, ..Default::default() };
        let out = check_positive(c, &cfg).unwrap();
        ensure(out.verdict == Verdict::HoldsOnSample && out.violations == 0, || {
            format!("{c} at d={d:?}: {} violations, witness {:?}", out.violations, out.witness)
        })?;
        lines.push(format!("{c}@{}", d.unwrap()));
    }
    Ok(format!("0 violations in 300 trials each: {}", lines.join(", ")))
}

fn degenerate_inputs() -> Check {
    let zero = MarginMatrix::from_rows(&["x", "y", "z"], &vec![vec![0; 3]; 3]).unwrap();
    for d in [0.5, 0.85, 1.0] {
        let out = ballotrank(&zero.clone().into(), &DampingConfig::with_damping(d), TransitionKind::SelfLoops).unwrap();
        ensure(out.degenerate, || "degenerate flag not set".into())?;
        ensure(close(&out.scores.scores, &[1.0 / 3.0; 3], 1e-12), || format!("d={d}: {:?}", out.scores.scores))?;
        ensure(out.ranking.groups == vec![vec![0, 1, 2]], || format!("ranking {:?}", out.ranking.groups))?;
        let t = &out.transition;
        ensure((0..3).all(|c| t.entry(c, c) == 1.0), || "zero columns are not pure self-loops".into())?;
    }
    // Undefeated candidate with no wins: its column is all zero before the
    // self-loop rule applies.
    let p = Profile::parse("candidates: a, b, c\na > b\nb > a\n2: c\n").unwrap();
    let m = profile_to_margins(&p);
    let (prepared, t) = transition_for(&m, TransitionKind::NoSelfLoops);
    ensure(!prepared.has_diagonal(), || "unexpected diagonal".into())?;
    ensure((0..3).all(|c| t.entry(c, c) == 1.0), || "zero columns are not pure self-loops".into())?;
    Ok("TW = 0 gives uniform scores, one tie group and the degenerate flag; zero columns become self-loops".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("toy election golden scores", toy_golden),
        ("toy election exact matrices", toy_exact),
        ("Minneapolis margins and winner", minneapolis),
        ("Oakland margins and winner", oakland),
        ("counterexample replays", replays),
        ("comparison with Condorcet methods", comparison_table),
        ("Condorcet winner identification", condorcet_identification),
        ("power method vs direct solve", solver_agreement),
        ("criteria property suites", property_suites),
        ("degenerate inputs", degenerate_inputs),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({ms} ms): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({ms} ms): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
