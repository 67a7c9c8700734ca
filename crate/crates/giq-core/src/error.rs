//! Error type shared by all engine modules.

/// Errors raised by the engine.
///
/// The CLI maps these to exit codes: input problems (parsing, invariant
/// violations, bad preconditions) are distinct from integrity failures,
/// which signal that a computed object escaped the structure the run
/// assumed (e.g. a pairing product landing outside the top-class line).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two polynomials (or a map and its argument) live over different rings.
    #[error("ring signature mismatch: {0}")]
    SignatureMismatch(String),

    /// A problem file could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Invalid input data or a violated precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A structural assumption failed on an otherwise valid instance.
    #[error("integrity error: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::SignatureMismatch(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }
}
