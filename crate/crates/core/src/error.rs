use thiserror::Error;

/// Errors raised by constructors, parsers and builders in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} lies outside the window [0, {horizon})")]
    OutOfWindow { element: u64, horizon: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("symbol {symbol} at position {position} is outside alphabet of size {alphabet}")]
    AlphabetMismatch {
        symbol: u64,
        position: usize,
        alphabet: u64,
    },

    #[error("cylinder {0} never occurs in the word")]
    CylinderNotFound(String),

    #[error("coordinate overflow guard reached at stage {stage}: {detail}")]
    Overflow { stage: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
