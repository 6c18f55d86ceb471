use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A step was requested on a chain with no infection attempts left.
    #[error("the process has terminated (no infection attempts remain)")]
    Terminated,

    #[error("state space of {states} cells exceeds the limit of {limit}")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
