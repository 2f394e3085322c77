use std::fmt;

use manifold_regress::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// A failed command: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    /// Estimator or numeric failure, reported with the error name.
    pub fn numeric(err: Error) -> Self {
        Failure { code: EXIT_NUMERIC, message: format!("{}: {err}", err.name()) }
    }

    pub fn io(err: impl fmt::Display) -> Self {
        Failure::usage(err.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
