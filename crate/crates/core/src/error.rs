use thiserror::Error;

use crate::measures::MeasureKind;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid risk {value}: {reason}")]
    InvalidRisk { value: f64, reason: &'static str },

    #[error("{kind} is undefined: {reason}")]
    UndefinedMeasure {
        kind: MeasureKind,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("quadrature resolution {got} is below the minimum of {min} cells per axis")]
    Resolution { got: usize, min: usize },

    #[error("degenerate cell {stratum}/{group}: {events} of {total} events gives an estimated risk of 0 or 1")]
    DegenerateCell {
        stratum: &'static str,
        group: &'static str,
        events: u64,
        total: u64,
    },

    #[error("unknown case study `{0}`")]
    UnknownCase(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: u64,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 2 for computation failures, 1 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UndefinedMeasure { .. } | Error::DegenerateCell { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
