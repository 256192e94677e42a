use crate::coalition::Coalition;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} (got {got}, limit {limit})")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    /// The feasible subgraph is disconnected or misses a required coalition.
    #[error("infeasible graph: coalition {coalition} {reason}")]
    Infeasible { coalition: Coalition, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("scalar mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("solver configuration: {0}")]
    Config(String),

    #[error(
        "conjugate gradient did not converge for player {player} after {iterations} iterations \
         (relative residual {residual:.3e})"
    )]
    Convergence {
        player: usize,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
