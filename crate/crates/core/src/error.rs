use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shape mismatch between operands, or a shape that violates a type invariant.
    #[error("shape error: {0}")]
    Shape(String),

    /// Axis or feature subset that is empty, full, out of range or duplicated.
    #[error("partition error: {0}")]
    Partition(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Operation requirements not met by otherwise well-formed input (missing labels, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Feature with zero empirical variance where a correlation was requested.
    #[error("degenerate feature {feature}: zero variance")]
    DegenerateFeature { feature: usize },

    #[error("capacity exceeded: {needed} entries requested, budget is {budget}")]
    Capacity { needed: u128, budget: u64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Format(_) | Error::Json(_) => 2,
            Error::Precondition(_)
            | Error::Degenerate(_)
            | Error::DegenerateFeature { .. }
            | Error::Shape(_)
            | Error::Partition(_)
            | Error::Argument(_) => 3,
            Error::Capacity { .. } => 4,
            Error::Numeric(_) | Error::Io(_) => 1,
        }
    }
}
