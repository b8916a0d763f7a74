//! Command-line front end for the chordlab engine.
//!
//! Every subcommand validates its flags, runs one library operation, writes
//! the declared CSV/JSON serialization (stdout by default, `--out` for a
//! file) and prints a one-line summary. Exit codes: 0 ok, 2 usage error,
//! 3 numerical failure, 4 inconclusive n-gon dedup.

// `!(a > b)` rather than `a <= b`: the negated form also rejects NaN flags.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod run;

use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 for usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    match run::dispatch(cli) {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
