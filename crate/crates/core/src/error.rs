use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("point {point:?} lies outside the coverage bounds")]
    OutOfBounds { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("joint {joint}: angle {angle} outside [{lo}, {hi}]")]
    Domain {
        joint: usize,
        angle: f64,
        lo: f64,
        hi: f64,
    },

    #[error("observation store is empty")]
    EmptyStore,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
