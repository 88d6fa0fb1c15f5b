// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod args;
mod commands;
mod config;
mod manifest;
mod progress;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches};

use args::Cli;
use commands::CliError;
use manifest::RunManifest;

fn parse(argv: &[OsString]) -> Result<Cli, clap::Error> {
    let matches = Cli::command().args_override_self(true).try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

fn usage_exit(err: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    let _ = err.print();
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            ExitCode::SUCCESS
        }
        _ => ExitCode::from(1),
    }
}

fn run(argv: Vec<OsString>) -> ExitCode {
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(e) => return usage_exit(e),
    };
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            let pairs = match config::read_pairs(path) {
                Ok(p) => p,
                Err(msg) => {
                    eprintln!("error: config file {msg}");
                    return ExitCode::from(1);
                }
            };
            let merged = config::splice_after_subcommand(&argv, cli.command.name(), config::as_flags(&pairs));
            match parse(&merged) {
                Ok(cli) => cli,
                Err(e) => return usage_exit(e),
            }
        }
    };

    let started = Instant::now();
    let threads = cli.threads.unwrap_or(0);
    let (result, used_threads) =
        phasefront::par::with_threads(threads, || (commands::run(&cli.command), phasefront::par::current_threads()));
    let ran = match result {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            return ExitCode::from(1);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let primary = &ran.outputs[0];
    let manifest = RunManifest::new(cli.command.name(), ran.parameters, used_threads, started.elapsed(), &ran.outputs)
        .map_err(|e| e.to_string())
        .and_then(|m| m.write(primary).map_err(|e| e.to_string()));
    match manifest {
        Ok(path) => {
            log::info!("wrote {} and {}", primary.display(), path.display());
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: writing manifest: {msg}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format(|buf, record| writeln!(buf, "[{}] {}", record.level().as_str().to_lowercase(), record.args()))
        .init();
    run(std::env::args_os().collect())
}
