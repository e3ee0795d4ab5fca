use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or unsupported parameters (field degree, code radius, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// The BCH generator degree differs from the designed `ν·t`.
    #[error("designed-parameter mismatch: generator degree {actual}, expected {expected} (nu={nu}, t={t})")]
    DesignMismatch {
        nu: u32,
        t: usize,
        expected: usize,
        actual: usize,
    },

    /// A computed probability or derived quantity fell outside its valid range.
    #[error("numerical consistency error: {0}")]
    Numerical(String),

    /// Threshold search endpoints did not bracket a success/failure transition.
    #[error("bracketing error: {0}")]
    Bracket(String),

    /// A minimizer ran into the edge of its search domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// `true` for parameter/configuration problems, as opposed to numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::DesignMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
