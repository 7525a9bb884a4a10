use std::process::ExitCode;

use clap::Parser;
use qpe_cli::{run, Cli, LOG_ENV};

fn main() -> ExitCode {
    env_logger::Builder::new()
        .parse_filters("warn")
        .parse_env(LOG_ENV)
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
