use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod exec;
mod output;
mod problem;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qagsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
