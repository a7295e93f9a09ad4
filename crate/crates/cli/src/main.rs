//! Command-line front end: `solve`, `compare`, `sweep`, `gen` and `bound`.
//!
//! Exit codes: 0 on success, 2 for usage and parse errors, 3 for infeasible instances
//! and contract violations.

mod args;
mod commands;
mod input;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Compare(a) => commands::compare(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Gen(a) => commands::gen(a),
        Command::Bound(a) => commands::bound(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
