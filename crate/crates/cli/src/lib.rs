//! Command-line front end for `arraymirror-core`: configuration, table
//! output and a rayon executor.

use std::io;

pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;
pub mod range;

pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] arraymirror_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{count} rows did not converge")]
    Unconverged { count: usize },
    #[error("{failed} of {total} criteria failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Invalid(_) => "INVALID_ARGUMENT",
            CliError::Config(_) => "BAD_CONFIG",
            CliError::Io(..) => "IO_ERROR",
            CliError::Usage(_) => "USAGE",
            CliError::Unconverged { .. } => "NO_CONVERGENCE",
            CliError::VerifyFailed { .. } => "VERIFY_FAILED",
        }
    }

    /// 1 for bad input, 2 for a numerical failure on valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Unconverged { .. } | CliError::VerifyFailed { .. } => 2,
            _ => 1,
        }
    }

    /// `arraymirror: error code=… exit=… message="…"` on one line.
    pub fn stderr_line(&self) -> String {
        let msg = self
            .to_string()
            .replace('\\', "\\\\")
            .replace('"', "\\\"")
            .replace('\n', " ");
        format!(
            "arraymirror: error code={} exit={} message=\"{msg}\"",
            self.code(),
            self.exit_code()
        )
    }
}
