//! Command-line front end: wires simulate -> featurize -> train ->
//! evaluate -> compare into reproducible runs.
//!
//! Every command that writes files also writes a `manifest.json` next to
//! them recording the exact command, the effective configuration, the
//! seeds, and SHA-256 digests of all inputs and outputs. Re-running the
//! command described by a manifest regenerates byte-identical outputs.
//!
//! Exit codes: 0 on success, 1 on a domain error (the message names the
//! violated precondition), 2 on a usage error.

mod commands;
mod config;
mod manifest;
mod report;

pub use manifest::RunManifest;

use clap::Parser;
use std::ffi::OsString;

#[derive(Debug, Parser)]
#[command(
    name = "reslife",
    version,
    about = "Residual life estimation: simulators, covariates, trainers, and evaluation protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

/// Parses and executes one command line; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let rendered: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(argv.iter()) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { 0 } else { 2 };
        }
    };
    match commands::run(cli.command, &rendered) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
