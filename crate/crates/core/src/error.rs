use thiserror::Error;

use crate::instance::Violation;

#[derive(Debug, Error)]
pub enum QkpError {
    /// Malformed or out-of-contract input.
    #[error("input error: {0}")]
    Input(String),

    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    /// A size guard (enumeration budget, oracle limit, numeric range) was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A post-condition the solver relies on did not hold. Should be unreachable.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, QkpError>;
