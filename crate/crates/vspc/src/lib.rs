//! File formats, parameter sweeps and reports for `vspc-core`.
//!
//! The `vspc` binary wraps these; everything here is usable as a library.

use std::path::PathBuf;

pub mod io;
pub mod report;
pub mod sweep;

pub use io::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("sweep spec: {0}")]
    Spec(ParseError),
    #[error(transparent)]
    Core(#[from] vspc_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for solver non-convergence,
    /// 4 for refused exhaustive work.
    pub fn exit_code(&self) -> i32 {
        use vspc_core::Error as E;
        match self {
            Error::Core(E::NotConverged { .. } | E::SpectralNoConvergence { .. }) => 3,
            Error::Core(E::BudgetExceeded { .. }) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
