use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("solver `{solver}` does not apply to {task} data")]
    TaskMismatch { solver: String, task: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: cannot parse `{cell}` as a number")]
    NonNumeric {
        line: u64,
        column: usize,
        cell: String,
    },

    #[error("line {line}: label {value} is not a binary class (expected 0/1 or -1/+1)")]
    BadLabel { line: u64, value: f64 },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    /// True for failures caused by the input data rather than by the numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::RaggedRow { .. }
                | Error::NonNumeric { .. }
                | Error::BadLabel { .. }
                | Error::Csv(_)
                | Error::Dimension(_)
        )
    }
}
