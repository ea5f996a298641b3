use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid subset mask {bits:#b} for {n} subsystems")]
    Mask { bits: u32, n: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("matrix is not Hermitian: max |rho - rho^dag| = {0:.3e} exceeds 1e-10")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite: min eigenvalue {0:.3e} below -1e-10")]
    NotPositive(f64),

    #[error("invalid trace: {0:.12} ({1})")]
    Trace(f64, &'static str),

    #[error("invalid norm: {0:.12} ({1})")]
    Norm(f64, &'static str),

    #[error("negative radicand {0:.3e} in concurrence formula")]
    NegativeRadicand(f64),

    #[error("method {method} not applicable: {reason}")]
    Method { method: String, reason: String },

    #[error("weight scheme is not a valid lower bound: subset {subset} has slack {slack}")]
    InvalidScheme { subset: String, slack: String },

    #[error("{0}")]
    Domain(String),

    #[error("state file: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Domain errors versus input/format errors; the CLI maps these to
    /// distinct exit codes.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::NotPositive(_)
                | Error::Trace(..)
                | Error::Norm(..)
                | Error::Format(_)
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}
