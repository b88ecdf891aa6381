use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(qrt_cli::main_with(qrt_cli::Cli::parse()))
}
