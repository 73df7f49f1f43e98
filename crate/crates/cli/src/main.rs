//! `robustpr` command-line tool.

mod args;
mod commands;
mod config;
mod error;
mod pgm;
mod plot;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{BenchCommand, Cli, Command, DiagCommand};
use error::{CliError, CliResult};

/// Later occurrences of a flag replace earlier ones, at every level. This is
/// what lets command-line flags override config entries.
fn override_self(cmd: clap::Command) -> clap::Command {
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let mut cmd = cmd.args_override_self(true);
    for name in names {
        cmd = cmd.mut_subcommand(name, override_self);
    }
    cmd
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("ROBUSTPR_THREADS") else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t >= 1 => t,
        _ => {
            return Err(CliError::Usage(format!(
                "ROBUSTPR_THREADS must be a positive integer, got {raw:?}"
            )))
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::Bench(b) => match b {
            BenchCommand::SuccessRate(a) => commands::success_rate(a),
            BenchCommand::ErrorIter(a) => commands::error_iter(a),
            BenchCommand::LambdaGrid(a) => commands::lambda_grid(a),
            BenchCommand::Consistency(a) => commands::consistency(a),
        },
        Command::Image(a) => commands::image(a),
        Command::Diag(d) => match d {
            DiagCommand::Stability(a) => commands::stability(a),
            DiagCommand::Certificate(a) => commands::certificate(a),
            DiagCommand::Remark5(a) => commands::remark5(a),
        },
    }
}

fn parse(argv: Vec<String>) -> CliResult<Result<Cli, clap::Error>> {
    let argv = config::expand(argv)?;
    let cmd = override_self(Cli::command());
    Ok(cmd
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m)))
}

fn main() -> ExitCode {
    let outcome = parse(std::env::args().collect()).and_then(|parsed| match parsed {
        Ok(cli) => {
            configure_threads()?;
            run(cli)
        }
        Err(e) => {
            // Help and version go to stdout with status 0; everything else is usage.
            let _ = e.print();
            let code = if e.use_stderr() { 2 } else { 0 };
            std::process::exit(code);
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
