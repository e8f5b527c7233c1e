use std::fmt;

/// Errors raised by the simulator and the clustering pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter {name} = {value} is outside {min}..={max}")]
    Validation {
        name: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    pub(crate) fn input(msg: impl fmt::Display) -> Self {
        Error::Input(msg.to_string())
    }

    pub(crate) fn parse(row: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            row,
            message: msg.to_string(),
        }
    }

    pub(crate) fn invariant(msg: impl fmt::Display) -> Self {
        Error::Invariant(msg.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let row = err.position().map(|p| p.line() as usize).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            kind => Error::Parse {
                row,
                message: format!("{kind:?}"),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
