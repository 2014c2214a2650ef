use thiserror::Error;

use crate::model::ItemId;

/// Errors shared by every solver in the crate.
///
/// The CLI maps `Input` to exit code 2 and `Capacity`/`Budget`/`Timeout` to
/// exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown item id {0}")]
    UnknownItem(ItemId),

    #[error("capacity exceeded: {what} ({size} > limit {limit}){hint}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("enumeration budget exceeded: estimated {estimated} guesses, budget {budget}")]
    Budget { estimated: u128, budget: u128 },

    #[error("timed out after {elapsed_ms} ms (best value so far {best_value})")]
    Timeout { elapsed_ms: u128, best_value: f64 },

    #[error("column generation did not converge within {columns} columns")]
    Convergence {
        columns: usize,
        best: Box<crate::config_lp::LpSolution>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::UnknownItem(_) | Error::Precondition(_) => 2,
            Error::Capacity { .. } | Error::Budget { .. } | Error::Timeout { .. } => 3,
            Error::Convergence { .. } | Error::Internal(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
