use std::io::Write;
use std::process::ExitCode;

use ballotrank_cli::args::{Cli, DAMPING_ENV};
use ballotrank_cli::{execute, CliError};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var(DAMPING_ENV).ok();
    match execute(&cli, env.as_deref()) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.stdout.as_bytes()).and_then(|()| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(CliError::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let sub = cmd.find_subcommand_mut(cli.command.name()).expect("subcommand exists");
            sub.error(ErrorKind::ArgumentConflict, msg).exit()
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
