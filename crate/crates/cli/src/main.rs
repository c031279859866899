//! `grrhdr`: simulate, reconstruct and analyze single-shot GRR HDR captures.
//!
//! Every command except `replay` writes `<out>.manifest.json` recording its
//! parameters and the SHA-256 of its inputs and outputs.

use std::process::ExitCode;

use clap::Parser;

use grrhdr_cli::commands::{self, Command};

const LONG_VERSION: &str =
    concat!(env!("CARGO_PKG_VERSION"), "\nmeasurement sidecar: 1\nmatrix (SSMX): 1\nscenario schema: 1\nmanifest: 1");

#[derive(Debug, Parser)]
#[command(name = "grrhdr", version, long_version = LONG_VERSION, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
