use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn ballotrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballotrank"))
        .args(args)
        .env_remove("BALLOTRANK_DAMPING")
        .output()
        .expect("binary runs")
}

fn with_input(cmd: &str, file: &str, rest: &[&str]) -> Output {
    let path = fixture(file);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(rest);
    ballotrank(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("invalid JSON ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema_validator() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let validator = schema_validator();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn names(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
}

#[test]
fn toy_ballotrank_ranking() {
    let out = with_input("tabulate", "toy.bal", &["--method", "ballotrank", "--damping", "0.85"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let ranking: Vec<Vec<String>> = v["ranking"].as_array().unwrap().iter().map(names).collect();
    assert_eq!(ranking, [["a"], ["b"], ["d"], ["c"]]);
    let scores: Vec<f64> = v["scores"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (s, want) in scores.iter().zip([0.8469, 0.0756, 0.0375, 0.0400]) {
        assert!((s - want).abs() < 5e-4, "{scores:?}");
    }
    assert_eq!(v["solver"]["converged"], true);
}

#[test]
fn oakland_minimax_elects_hutchinson() {
    let out = with_input("tabulate", "oakland.csv", &["--format", "margins", "--method", "minimax"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(names(&v["winner"]), ["Hutchinson"]);
    assert_eq!(v["scores"], serde_json::json!([46, 299, 557]));
    assert!(v["solver"].is_null());
}

#[test]
fn toy_irv_elects_a() {
    let out = with_input("tabulate", "toy.bal", &["--method", "irv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(names(&json(&out)["winner"]), ["a"]);
}

#[test]
fn compare_reports_agreement() {
    let out = with_input("compare", "oakland.csv", &[]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["match"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
    for w in v["winners"].as_array().unwrap() {
        assert_eq!(names(&w["winner"]), ["Hutchinson"]);
    }

    let out = with_input("compare", "toy.bal", &["--methods", "ballotrank,minimax,rankedpairs,schulze,irv,cv"]);
    let v = json(&out);
    assert_eq!(v["match"], true);
    assert_eq!(v["winners"].as_array().unwrap().len(), 6);
}

#[test]
fn compare_on_printed_minneapolis_margins() {
    // The printed margins give Arab the smallest worst defeat, the strongest
    // locked pair and the winning beatpaths, so every method agrees.
    let out = with_input("compare", "minneapolis.csv", &[]);
    let v = json(&out);
    for w in v["winners"].as_array().unwrap() {
        assert_eq!(names(&w["winner"]), ["Arab"], "{}", w["method"]);
    }
    assert_eq!(v["match"], true);
}

#[test]
fn sweep_csv_columns_and_winners() {
    let out = with_input("sweep", "oakland.csv", &["--d-min", "0.05", "--d-max", "0.95", "--d-step", "0.05"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "d,Hutchinson,Resnick,Manigo,winner,converged,iterations,bifurcation");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 19);
    assert_eq!(rows[0][0], "0.05");
    assert_eq!(rows[18][0], "0.95");
    for r in &rows {
        assert_eq!(r[4], "Hutchinson");
        assert_eq!(r[5], "true");
        assert_eq!(r[7], "false");
    }
}

#[test]
fn sweep_clone1_at_one() {
    let out = with_input("sweep", "clone1.bal", &["--d-min", "1", "--d-max", "1", "--output", "json"]);
    let v = json(&out);
    let row = &v["rows"][0];
    assert_eq!(row["d"], 1.0);
    assert!((row["scores"][0].as_f64().unwrap() - 0.2669).abs() < 5e-4);
    assert!((row["scores"][1].as_f64().unwrap() - 0.2641).abs() < 5e-4);
    assert_eq!(names(&row["winner"]), ["a"]);
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = with_input("sweep", "toy.bal", &["--d-min", "0.5", "--d-max", "1.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn criteria_fixture_suite_reproduces_all() {
    let out = ballotrank(&["criteria", "--suite", "fixtures"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["fixture_reproduced"], 5);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 5);
    assert_valid(&v);
}

#[test]
fn criteria_random_suite_holds() {
    let out = ballotrank(&["criteria", "--suite", "random", "--trials", "300", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["holds_on_sample"], 6);
    assert_valid(&v);
}

#[test]
fn criteria_zero_trials_is_empty() {
    let out = ballotrank(&["criteria", "--suite", "random", "--trials", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["outcomes"], serde_json::json!([]));
    assert_valid(&v);
}

#[test]
fn criteria_flag_validation() {
    assert_eq!(code(&ballotrank(&["criteria", "--suite", "fixtures", "--damping", "0.5"])), 2);
    assert_eq!(code(&ballotrank(&["criteria", "--suite", "fixtures", "--method", "minimax"])), 2);
    assert_eq!(code(&ballotrank(&["criteria", "--suite", "random", "--only", "cloning"])), 2);
    assert_eq!(code(&ballotrank(&["criteria", "--suite", "random", "--method", "schulze", "--damping", "0.5"])), 2);
}

#[test]
fn conflicting_flags_exit_2_with_usage() {
    for (file, extra) in [
        ("toy.bal", &["--method", "minimax", "--damping", "0.5"][..]),
        ("toy.bal", &["--method", "schulze", "--max-iter", "10"][..]),
        ("toy.bal", &["--method", "cv", "--variant", "unweighted"][..]),
        ("toy.bal", &["--method", "irv", "--emit-graph", "/dev/null"][..]),
        ("oakland.csv", &["--method", "irv"][..]),
        ("oakland.csv", &["--method", "cv"][..]),
    ] {
        let out = with_input("tabulate", file, extra);
        assert_eq!(code(&out), 2, "{extra:?}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("Usage:"), "{extra:?}: {err}");
    }
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bal");
    std::fs::write(&bad, "candidates: a, b\n2: a > z\n").unwrap();
    let out = ballotrank(&["tabulate", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown candidate"));

    let missing = dir.path().join("missing.bal");
    assert_eq!(code(&ballotrank(&["tabulate", "--input", missing.to_str().unwrap()])), 2);
    assert_eq!(code(&with_input("tabulate", "toy.bal", &["--damping", "0"])), 2);
    assert_eq!(code(&with_input("tabulate", "toy.bal", &["--method", "borda"])), 2);
}

#[test]
fn non_convergence_exits_3_with_report() {
    let out = with_input("tabulate", "toy.bal", &["--max-iter", "2"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["solver"]["converged"], false);
    assert_valid(&v);
}

#[test]
fn output_is_deterministic() {
    for args in [&["--method", "ballotrank"][..], &["--method", "cv"][..], &["--method", "irv", "--output", "text"][..]]
    {
        let a = with_input("tabulate", "lnh1.bal", args);
        let b = with_input("tabulate", "lnh1.bal", args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = ballotrank(&["criteria", "--suite", "random", "--trials", "50", "--seed", "9"]);
    let b = ballotrank(&["criteria", "--suite", "random", "--trials", "50", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_config_reproduces_report() {
    let first = json(&with_input("tabulate", "noshow2.bal", &["--damping", "0.3", "--variant", "noselfloops"]));
    let cfg = &first["config"];
    assert_eq!(cfg["variant"], "no_self_loops");
    let again = with_input(
        "tabulate",
        "noshow2.bal",
        &[
            "--damping",
            &cfg["damping"].to_string(),
            "--variant",
            "noselfloops",
            "--tolerance",
            &cfg["tolerance"].to_string(),
            "--max-iter",
            &cfg["max_iter"].to_string(),
        ],
    );
    assert_eq!(json(&again), first);
}

#[test]
fn env_damping_is_a_default() {
    let path = fixture("toy.bal");
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ballotrank"));
        cmd.args(["tabulate", "--input", path.to_str().unwrap()]).args(extra);
        match env {
            Some(d) => cmd.env("BALLOTRANK_DAMPING", d),
            None => cmd.env_remove("BALLOTRANK_DAMPING"),
        };
        cmd.output().unwrap()
    };
    let v = json(&run(Some("0.5"), &[]));
    assert_eq!(v["config"]["damping"], 0.5);
    let v = json(&run(Some("0.5"), &["--damping", "0.9"]));
    assert_eq!(v["config"]["damping"], 0.9);
    // undamped methods ignore the variable instead of treating it as a flag
    let out = run(Some("0.5"), &["--method", "minimax"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["config"]["damping"].is_null());
    assert_eq!(code(&run(Some("lots"), &[])), 2);
}

#[test]
fn emit_graph_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("oakland.dot");
    let out = with_input("tabulate", "oakland.csv", &["--emit-graph", dot.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"Manigo\" -> \"Manigo\" [label=\"0.0000915\"]"));
}

#[test]
fn text_output_uses_four_digits() {
    let out = with_input("tabulate", "toy.bal", &["--output", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.8469"), "{text}");
    assert!(text.contains("ranking: a > b > d > c"));
    assert!(!text.contains("0.84688"));
}

#[test]
fn json_floats_have_at_most_12_digits() {
    let out = with_input("tabulate", "clone2.bal", &["--damping", "0.77"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for token in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        if token.contains('.') {
            let mantissa = token.split('e').next().unwrap();
            let digits = mantissa.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
            assert!(digits <= 12, "{token}");
        }
    }
}

#[test]
fn every_json_report_matches_schema() {
    let cases: Vec<Output> = vec![
        with_input("tabulate", "toy.bal", &[]),
        with_input("tabulate", "toy.bal", &["--method", "cv"]),
        with_input("tabulate", "toy.bal", &["--method", "irv"]),
        with_input("tabulate", "minneapolis.csv", &["--method", "rankedpairs"]),
        with_input("tabulate", "minneapolis.csv", &["--method", "schulze"]),
        with_input("tabulate", "oakland.csv", &["--method", "minimax"]),
        with_input("tabulate", "lnh2.bal", &["--damping", "1"]),
        with_input("compare", "toy.bal", &["--methods", "ballotrank,minimax,rankedpairs,schulze,irv,cv"]),
        with_input("sweep", "minneapolis.csv", &["--output", "json", "--d-min", "0"]),
        ballotrank(&["criteria", "--suite", "random", "--trials", "20", "--method", "schulze"]),
    ];
    for out in &cases {
        assert_valid(&json(out));
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let validator = schema_validator();
    let mut v = json(&with_input("tabulate", "toy.bal", &[]));
    assert!(validator.is_valid(&v));
    v["method"] = "borda".into();
    assert!(!validator.is_valid(&v));
    let mut v = json(&ballotrank(&["criteria", "--suite", "fixtures"]));
    v["outcomes"][0]["verdict"] = "maybe".into();
    assert!(!validator.is_valid(&v));
}
