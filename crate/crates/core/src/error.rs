use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid feeder spec: {0}")]
    InvalidSpec(String),

    #[error("unknown {kind} type {name:?}; catalogue contains: {known}")]
    UnknownType {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("power flow did not converge")]
    NotConverged,

    #[error("degenerate region: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
