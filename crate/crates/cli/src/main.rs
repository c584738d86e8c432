use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::Cli;

/// Worker threads for independent mesh runs.
pub const THREADS_ENV: &str = "MORLEY_THREADS";

pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
