//! Library half of the `ascover` binary: argument types, spec files,
//! output encoders and the command implementations.

pub mod commands;
pub mod output;
pub mod spec;

use std::fmt;

use ascover_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const BAD_INPUT: i32 = 2;
    pub const BAD_PRIME: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const ASSERTION: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed arguments, spec files or IO problems.
    Input(String),
    Core(Error),
    /// A verification suite or self-test reported failures.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => exit::BAD_INPUT,
            CliError::Failed(_) => exit::ASSERTION,
            CliError::Core(e) => match e {
                Error::BadPrime { .. } | Error::NotPrime(_) => exit::BAD_PRIME,
                Error::BudgetExceeded { .. } => exit::BUDGET,
                Error::Assertion(_) => exit::ASSERTION,
                _ => exit::BAD_INPUT,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Core(Error::InvalidFunction(vs)) => {
                f.write_str("invalid rational function:")?;
                for v in vs {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Input(format!("io: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
