//! Command-line surface over the `tauforge` engine: JSON formats, a
//! content-addressed result cache, and the subcommands.

pub mod cache;
pub mod commands;
pub mod formats;

use std::fmt;

pub use commands::{run, Cli, Outcome};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input or flags.
    Usage(String),
    /// Well-formed input outside the domain of the computation.
    Domain(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage: {}", s),
            CliError::Domain(s) => write!(f, "{}", s),
            CliError::Io(s) => write!(f, "io: {}", s),
        }
    }
}

impl std::error::Error for CliError {}

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
