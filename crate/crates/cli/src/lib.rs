//! Batch entry points for the traceqa pipeline.
//!
//! Each subcommand lives in its own module and writes its table or summary to
//! the given writer. Exit codes: 0 success, 2 usage, 3 data or validation,
//! 4 I/O.

pub mod args;
pub mod error;
pub mod gen;
pub mod report;
pub mod score;
pub mod serve;
pub mod simulate;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => gen::run(a, stdout),
        Command::Score(a) => score::run(a, stdout),
        Command::Report(a) => report::run(a, stdout),
        Command::Simulate(a) => simulate::run(a, stdout),
        Command::Serve(a) => serve::run(a, stdout),
    }
}
