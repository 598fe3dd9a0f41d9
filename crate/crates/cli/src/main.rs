// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! `scauth`: set up a server, issue cards, log in over a simulated channel,
//! run the attacks and print the cost table.
//!
//! Exit codes: 0 success, 1 error, 2 login rejected, 3 result differs from
//! the expected one, 64 usage error.

mod args;
mod commands;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{Outcome, UsageError};

const EXIT_ERROR: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let mut out = String::new();
    let result = commands::run(cli, &mut out);
    // A closed pipe (`scauth costs | head`) is not an error.
    if let Err(e) = io::stdout().lock().write_all(out.as_bytes()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: writing stdout: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(EXIT_REJECTED),
        Ok(Outcome::Mismatch) => ExitCode::from(EXIT_MISMATCH),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_ERROR)
            }
        }
    }
}
