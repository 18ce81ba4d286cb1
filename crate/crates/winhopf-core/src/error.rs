//! Error type shared by every module of the crate.

use thiserror::Error;

/// Library-wide error enum. The stable identifiers (`E_NOT_INVERTIBLE`, ...)
/// are part of the CLI contract: mathematical precondition failures map to
/// exit code 1, input/schema failures to exit code 2.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("E_NOT_INVERTIBLE: {0}")]
    NotInvertible(String),
    #[error("E_ROOT_MARGIN: {0}")]
    RootMargin(String),
    #[error("E_NOT_MATCHING: {0}")]
    NotMatching(String),
    #[error("E_NOT_UNIMODULAR_AT_0: {0}")]
    NotUnimodularAtZero(String),
    #[error("E_NOT_STRICTLY_PROPER: {0}")]
    NotStrictlyProper(String),
    #[error("E_BACKEND_UNSUPPORTED: {0}")]
    BackendUnsupported(String),
    #[error("E_BACKEND_MISMATCH: {0}")]
    BackendMismatch(String),
    #[error("E_SHIFT_OFF_GRID: {0}")]
    ShiftOffGrid(String),
    #[error("E_PRECONDITION: {0}")]
    Precondition(String),
    #[error("E_RANK_AMBIGUOUS: {0}")]
    RankAmbiguous(String),
    #[error("E_SCHEMA: {0}")]
    Schema(String),
    #[error("E_IO: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier, e.g. `E_NOT_INVERTIBLE`.
    pub fn id(&self) -> &'static str {
        match self {
            Error::NotInvertible(_) => "E_NOT_INVERTIBLE",
            Error::RootMargin(_) => "E_ROOT_MARGIN",
            Error::NotMatching(_) => "E_NOT_MATCHING",
            Error::NotUnimodularAtZero(_) => "E_NOT_UNIMODULAR_AT_0",
            Error::NotStrictlyProper(_) => "E_NOT_STRICTLY_PROPER",
            Error::BackendUnsupported(_) => "E_BACKEND_UNSUPPORTED",
            Error::BackendMismatch(_) => "E_BACKEND_MISMATCH",
            Error::ShiftOffGrid(_) => "E_SHIFT_OFF_GRID",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::RankAmbiguous(_) => "E_RANK_AMBIGUOUS",
            Error::Schema(_) => "E_SCHEMA",
            Error::Io(_) => "E_IO",
        }
    }

    /// True for input/schema failures (CLI exit code 2); false for
    /// mathematical precondition failures (exit code 1).
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Schema(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
