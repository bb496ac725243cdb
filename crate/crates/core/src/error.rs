use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow during {0}")]
    Overflow(&'static str),

    #[error("search space of {count} candidates exceeds budget {budget}")]
    OverBudget { count: u128, budget: u128 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("self-validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
