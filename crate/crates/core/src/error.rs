use thiserror::Error;

/// Errors raised by model parsing, abstraction and the oracle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("undeclared species `{0}`")]
    UndeclaredSpecies(String),

    #[error("value must be positive, got {0}")]
    NonPositive(String),

    #[error("invalid partition: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidPartition(Vec<crate::abstraction::Violation>),

    #[error("reaction `{reaction}` is not enabled in state {state:?}")]
    NotEnabled { reaction: String, state: Vec<u64> },

    #[error("state space exceeds the limit of {limit} states")]
    StateLimit { limit: usize },

    #[error("state {0} is absorbing")]
    Absorbing(usize),

    #[error("state set is not a bottom strongly connected component: {0}")]
    NotBottom(String),

    #[error("{0}")]
    Invalid(String),

    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
