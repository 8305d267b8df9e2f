use std::process::ExitCode;

use clap::Parser;
use ncdegree_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match ncdegree_cli::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
