//! `boxl0` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run or check fails, 2 on invalid
//! input or configuration.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// `println!` that ignores a closed stdout, e.g. when piped into `head`.
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// `print!` counterpart of [`outln!`].
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

mod args;
mod bench;
mod image;
mod plot;
mod selftest;
mod solve;

use std::fmt::Display;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A terminal error together with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    /// Malformed input, flags, or configuration (exit 2).
    pub fn usage(message: impl Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }

    /// A run that started but did not succeed (exit 1).
    pub fn failure(message: impl Display) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(a) => bench::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Image(a) => image::run(a),
        Command::Plot(a) => plot::run(a),
        Command::Selftest(a) => selftest::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
