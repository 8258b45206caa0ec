mod args;
mod commands;
mod config;
mod failure;

use std::ffi::OsString;
use std::panic;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::Cli;
use commands::Context;
use failure::Failure;

fn parse(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let argv = match config::merge_config(argv, &Cli::command()) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return Err(ExitCode::from(f.exit_code()));
        }
    };
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        // Help and version exit 0; every other parse error is a usage error.
        if e.exit_code() == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    })
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let ctx = Context {
        seed: cli.seed,
        format: cli.format,
    };
    let command = cli.command;
    let outcome = panic::catch_unwind(panic::AssertUnwindSafe(|| commands::run(command, &ctx)))
        .unwrap_or_else(|_| Err(Failure::Internal("unexpected internal error".into())));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
