//! `fdrisk`: extract statistics from abstracts, fit the z-curve, simulate
//! its error, and pick alpha levels.
//!
//! Exit status: 0 success, 1 analysis failure, 2 usage or I/O failure.

mod args;
mod commands;
mod config;
mod error;
mod manifest;
mod table;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult};

/// Drops `--config` and its value; the merged argument list already holds
/// whatever the file contributed.
fn strip_config(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--config" {
            skip = true;
        } else if !a.starts_with("--config=") {
            out.push(a.clone());
        }
    }
    out
}

/// Runs a command from arguments that exclude the program name.
pub(crate) fn dispatch(args: &[String]) -> CliResult<()> {
    let full: Vec<String> = std::iter::once("fdrisk".to_string()).chain(args.iter().cloned()).collect();
    let cli = Cli::try_parse_from(&full).map_err(|e| CliError::Usage(e.render().to_string()))?;
    execute(cli, args)
}

fn execute(cli: Cli, recorded: &[String]) -> CliResult<()> {
    match cli.command {
        Command::Extract(a) => commands::extract::run(&a, recorded),
        Command::Fit(a) => commands::fit::run(&a, recorded),
        Command::Simulate(a) => commands::simulate::run(&a, recorded),
        Command::AdjustAlpha(a) => commands::adjust::run(&a, recorded),
        Command::Replay(a) => commands::replay::run(&a),
    }
}

/// Clap omits the usage line for bad values; print it so every usage error
/// shows how the command is called.
fn usage_hint(e: &clap::Error, subcommand: Option<&str>) {
    if e.render().to_string().contains("Usage:") {
        return;
    }
    let mut cmd = Cli::command();
    cmd.build();
    let usage = match subcommand.and_then(|name| cmd.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage(),
        None => cmd.render_usage(),
    };
    eprintln!("\n{usage}");
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let result = config::merge(&raw).and_then(|merged| {
        let cli = match Cli::try_parse_from(&merged) {
            Ok(cli) => cli,
            Err(e) if !e.use_stderr() => e.exit(),
            Err(e) => {
                eprint!("{}", e.render());
                usage_hint(&e, merged.get(1).map(String::as_str));
                std::process::exit(2);
            }
        };
        execute(cli, &strip_config(&merged[1..]))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
