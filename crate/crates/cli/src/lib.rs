//! Command-line front end for the `ballotrank` library.
//!
//! [`execute`] runs a parsed command and returns what to print and the exit
//! status. Exit statuses: 0 success, 1 a counterexample fixture failed to
//! reproduce, 2 input or usage error, 3 the power method did not converge
//! (the report is still printed).

pub mod args;
pub mod commands;
pub mod json;
pub mod report;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Conflicting or invalid flags; reported together with usage text.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Library(#[from] ballotrank::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Rendered output and exit status of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    pub fn new(stdout: String, code: i32) -> Self {
        Outcome { stdout, code }
    }
}

/// Runs `cli`. `env_damping` is the raw value of [`args::DAMPING_ENV`], if set.
pub fn execute(cli: &Cli, env_damping: Option<&str>) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Tabulate(a) => commands::tabulate(a, env_damping),
        Command::Compare(a) => commands::compare(a, env_damping),
        Command::Sweep(a) => commands::sweep(a),
        Command::Criteria(a) => commands::criteria(a),
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tabulate(_) => "tabulate",
            Command::Compare(_) => "compare",
            Command::Sweep(_) => "sweep",
            Command::Criteria(_) => "criteria",
        }
    }
}
