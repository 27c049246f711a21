use std::fs;
use std::path::Path;

use ballotrank::condorcet::analyze;
use ballotrank::criteria::{check_positive, replay_counterexample, CheckConfig, Criterion};
use ballotrank::margins::{transition_for, TransitionKind};
use ballotrank::profile::{parse_ballot_file, parse_margin_csv};
use ballotrank::rank::{damping_grid, damping_sweep, DampingConfig, Election};
use ballotrank::rivals::{self, Method, MethodResult, RunOptions};
use sha2::{Digest, Sha256};

use crate::args::{
    CompareArgs, CriteriaArgs, InputArgs, InputFormat, OutputFormat, SolverArgs, Suite, SweepArgs, TabulateArgs,
};
use crate::json::to_json;
use crate::report::{
    ranking_names, score_parts, CompareReport, CondorcetSummary, ConfigReport, CriteriaReport, InputDescriptor,
    MethodWinner, SolverReport, SweepReport, SweepRowReport, TabulationReport, VerdictCounts,
};
use crate::{CliError, Outcome};

/// Reads and parses the election named by `args`.
pub fn load(args: &InputArgs) -> Result<(Election, InputDescriptor), CliError> {
    let path = &args.input;
    let shown = path.display().to_string();
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input { path: shown.clone(), message: "not valid UTF-8".into() })?;
    let format = args.format.unwrap_or_else(|| infer_format(path));
    let parsed = match format {
        InputFormat::Ballots => parse_ballot_file(&text).map(Election::from),
        InputFormat::Margins => parse_margin_csv(&text).map(Election::from),
    };
    let election = parsed.map_err(|e| CliError::Input { path: shown.clone(), message: e.to_string() })?;
    let descriptor =
        InputDescriptor { file: shown, format: format.as_str(), sha256: format!("{:x}", Sha256::digest(&bytes)) };
    Ok((election, descriptor))
}

fn infer_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Margins,
        _ => InputFormat::Ballots,
    }
}

fn parse_env_damping(env: Option<&str>) -> Result<Option<f64>, CliError> {
    env.map(|raw| {
        raw.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{} is not a number: {raw:?}", crate::args::DAMPING_ENV)))
    })
    .transpose()
}

fn run_options(solver: &SolverArgs, damping: Option<f64>) -> RunOptions {
    let defaults = RunOptions::default();
    RunOptions {
        damping,
        tolerance: solver.tolerance.unwrap_or(defaults.tolerance),
        max_iterations: solver.max_iter.unwrap_or(defaults.max_iterations),
        variant: solver.variant.map_or(defaults.variant, Into::into),
        tie_epsilon: defaults.tie_epsilon,
    }
}

/// Rejects solver flags that no selected method would read.
fn check_solver_flags(solver: &SolverArgs, methods: &[Method]) -> Result<(), CliError> {
    let names = || methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ");
    if !methods.iter().any(|m| m.is_damped()) {
        let given = [
            ("--damping", solver.damping.is_some()),
            ("--variant", solver.variant.is_some()),
            ("--tolerance", solver.tolerance.is_some()),
            ("--max-iter", solver.max_iter.is_some()),
        ];
        if let Some((flag, _)) = given.iter().find(|(_, set)| *set) {
            return Err(CliError::Usage(format!("{flag} does not apply to {}", names())));
        }
    }
    if solver.variant.is_some() && !methods.contains(&Method::BallotRank) {
        return Err(CliError::Usage(format!("--variant does not apply to {}", names())));
    }
    Ok(())
}

fn check_ballots(election: &Election, methods: &[Method]) -> Result<(), CliError> {
    if election.profile().is_none() {
        if let Some(m) = methods.iter().find(|m| m.needs_ballots()) {
            return Err(CliError::Usage(format!("{m} needs a ballot file, not a margin matrix")));
        }
    }
    Ok(())
}

fn tabulation_report(
    result: MethodResult,
    election: &Election,
    input: &InputDescriptor,
    opts: &RunOptions,
) -> TabulationReport {
    let names = election.names();
    let config = match opts.config_for(result.method) {
        Some(cfg) => ConfigReport {
            damping: Some(cfg.d),
            variant: (result.method == Method::BallotRank).then_some(opts.variant),
            tolerance: Some(cfg.tolerance),
            max_iter: Some(cfg.max_iterations),
            tie_epsilon: Some(opts.tie_epsilon),
        },
        None => ConfigReport { damping: None, variant: None, tolerance: None, max_iter: None, tie_epsilon: None },
    };
    let solver = result.score_vector().map(|s| SolverReport {
        iterations: s.iterations,
        converged: s.converged,
        residual: s.residual,
        fallback: s.fallback,
        direct_gap: match &result.trace {
            rivals::MethodTrace::BallotRank(t) => t.direct_gap,
            _ => None,
        },
    });
    let (score_kind, scores) = score_parts(&result.scores);
    TabulationReport {
        input: input.clone(),
        method: result.method,
        config,
        candidates: names.clone(),
        score_kind,
        scores,
        ranking: ranking_names(&result.ranking, &names),
        winner: result.winners().iter().map(|&c| names[c].clone()).collect(),
        condorcet: CondorcetSummary::new(&analyze(&election.margins()), &names),
        solver,
        trace: result.trace,
    }
}

fn render<J: serde::Serialize>(
    output: OutputFormat,
    report: &J,
    text: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
) -> String {
    match output {
        OutputFormat::Json => to_json(report),
        OutputFormat::Text => text(),
        OutputFormat::Csv => csv(),
    }
}

pub fn tabulate(args: &TabulateArgs, env_damping: Option<&str>) -> Result<Outcome, CliError> {
    let method: Method = args.method.into();
    check_solver_flags(&args.solver, &[method])?;
    if args.emit_graph.is_some() && method != Method::BallotRank {
        return Err(CliError::Usage(format!("--emit-graph does not apply to {method}")));
    }
    let damping = match args.solver.damping {
        Some(d) => Some(d),
        None if method.is_damped() => parse_env_damping(env_damping)?,
        None => None,
    };
    let (election, input) = load(&args.input)?;
    check_ballots(&election, &[method])?;
    let opts = run_options(&args.solver, damping);
    let result = rivals::run(method, &election, &opts)?;
    if let Some(path) = &args.emit_graph {
        let (_, t) = transition_for(&election.margins(), opts.variant);
        fs::write(path, t.to_dot()).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let report = tabulation_report(result, &election, &input, &opts);
    let stdout = render(args.output, &report, || report.to_text(), || report.to_csv());
    Ok(Outcome::new(stdout, if report.converged() { 0 } else { 3 }))
}

pub fn compare(args: &CompareArgs, env_damping: Option<&str>) -> Result<Outcome, CliError> {
    let mut methods: Vec<Method> = Vec::new();
    for m in args.methods.iter().map(|&m| Method::from(m)) {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    check_solver_flags(&args.solver, &methods)?;
    let damping = match args.solver.damping {
        Some(d) => Some(d),
        None => parse_env_damping(env_damping)?,
    };
    let (election, input) = load(&args.input)?;
    check_ballots(&election, &methods)?;
    let opts = run_options(&args.solver, damping);
    let reports = methods
        .iter()
        .map(|&m| rivals::run(m, &election, &opts).map(|r| tabulation_report(r, &election, &input, &opts)))
        .collect::<Result<Vec<_>, _>>()?;
    let winners: Vec<MethodWinner> =
        reports.iter().map(|r| MethodWinner { method: r.method, winner: r.winner.clone() }).collect();
    let agreement = winners.windows(2).all(|w| w[0].winner == w[1].winner);
    let converged = reports.iter().all(TabulationReport::converged);
    let report = CompareReport { input, winners, agreement, reports };
    let stdout = render(args.output, &report, || report.to_text(), || report.to_csv());
    Ok(Outcome::new(stdout, if converged { 0 } else { 3 }))
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let grid = damping_grid(args.d_min, args.d_max, args.d_step).map_err(|e| CliError::Usage(e.to_string()))?;
    let (election, input) = load(&args.input)?;
    let variant: TransitionKind = args.variant.map_or(TransitionKind::SelfLoops, Into::into);
    let defaults = DampingConfig::default();
    let base = DampingConfig {
        d: defaults.d,
        tolerance: args.tolerance.unwrap_or(defaults.tolerance),
        max_iterations: args.max_iter.unwrap_or(defaults.max_iterations),
    };
    let names = election.names();
    let rows = damping_sweep(&election, &grid, variant, &base)?
        .into_iter()
        .map(|row| SweepRowReport {
            d: row.d,
            winner: row.winners.iter().map(|&c| names[c].clone()).collect(),
            converged: row.scores.converged,
            iterations: row.scores.iterations,
            scores: row.scores.scores,
            bifurcation: row.winner_changed,
        })
        .collect();
    let report = SweepReport {
        input,
        config: ConfigReport {
            damping: None,
            variant: Some(variant),
            tolerance: Some(base.tolerance),
            max_iter: Some(base.max_iterations),
            tie_epsilon: Some(RunOptions::default().tie_epsilon),
        },
        candidates: names,
        rows,
    };
    let stdout = render(args.output, &report, || report.to_text(), || report.to_csv());
    Ok(Outcome::new(stdout, if report.converged() { 0 } else { 3 }))
}

pub fn criteria(args: &CriteriaArgs) -> Result<Outcome, CliError> {
    let method: Method = args.method.into();
    let (pool, suite): (&[Criterion], &'static str) = match args.suite {
        Suite::Fixtures => (&Criterion::REPLAY, "fixtures"),
        Suite::Random => (&Criterion::POSITIVE, "random"),
    };
    if let Some(c) = args.only.iter().find(|c| !pool.contains(c)) {
        return Err(CliError::Usage(format!("criterion {c} is not part of the {suite} suite")));
    }
    let selected: Vec<Criterion> =
        pool.iter().copied().filter(|c| args.only.is_empty() || args.only.contains(c)).collect();

    let outcomes = match args.suite {
        Suite::Fixtures => {
            if method != Method::BallotRank {
                return Err(CliError::Usage("the fixtures suite replays BallotRank only; drop --method".into()));
            }
            if args.damping.is_some() {
                return Err(CliError::Usage("the fixtures suite uses fixed damping values; drop --damping".into()));
            }
            selected.iter().map(|&c| replay_counterexample(c)).collect::<Result<Vec<_>, _>>()?
        }
        Suite::Random => {
            if args.damping.is_some() && !method.is_damped() {
                return Err(CliError::Usage(format!("--damping does not apply to {method}")));
            }
            if let Some(d) = args.damping {
                DampingConfig::with_damping(d).validate()?;
            }
            if args.trials == 0 {
                Vec::new()
            } else {
                let cfg = CheckConfig {
                    method,
                    damping: args.damping,
                    trials: args.trials,
                    seed: args.seed,
                    ..CheckConfig::default()
                };
                selected.iter().map(|&c| check_positive(c, &cfg)).collect::<Result<Vec<_>, _>>()?
            }
        }
    };
    let report = CriteriaReport {
        suite,
        method,
        seed: (args.suite == Suite::Random).then_some(args.seed),
        trials: if args.suite == Suite::Random { args.trials } else { 0 },
        summary: VerdictCounts::tally(&outcomes),
        outcomes,
    };
    let stdout = render(args.output, &report, || report.to_text(), || report.to_csv());
    Ok(Outcome::new(stdout, if report.has_mismatch() { 1 } else { 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::VariantArg;

    fn solver() -> SolverArgs {
        SolverArgs { damping: None, variant: None, tolerance: None, max_iter: None }
    }

    #[test]
    fn undamped_methods_reject_solver_flags() {
        let s = SolverArgs { damping: Some(0.5), ..solver() };
        assert!(check_solver_flags(&s, &[Method::Minimax]).is_err());
        assert!(check_solver_flags(&s, &[Method::Minimax, Method::Cv]).is_ok());
        let s = SolverArgs { max_iter: Some(10), ..solver() };
        assert!(check_solver_flags(&s, &[Method::Schulze, Method::Irv]).is_err());
    }

    #[test]
    fn variant_needs_ballotrank() {
        let s = SolverArgs { variant: Some(VariantArg::Unweighted), ..solver() };
        assert!(check_solver_flags(&s, &[Method::Cv]).is_err());
        assert!(check_solver_flags(&s, &[Method::BallotRank, Method::Cv]).is_ok());
    }

    #[test]
    fn env_damping_must_parse() {
        assert_eq!(parse_env_damping(None).unwrap(), None);
        assert_eq!(parse_env_damping(Some(" 0.5 ")).unwrap(), Some(0.5));
        assert!(parse_env_damping(Some("half")).is_err());
    }

    #[test]
    fn csv_extension_means_margins() {
        assert_eq!(infer_format(Path::new("x/oakland.CSV")), InputFormat::Margins);
        assert_eq!(infer_format(Path::new("toy.bal")), InputFormat::Ballots);
        assert_eq!(infer_format(Path::new("toy")), InputFormat::Ballots);
    }
}
