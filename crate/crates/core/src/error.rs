//! Error types shared across modules.

use thiserror::Error;

/// Failure to parse a textual value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// The text is not of the form `a` or `a/b` with integers `a`, `b != 0`.
    #[error("not a rational number: {0:?}")]
    Rational(String),
    /// The text is not a small fraction usable as an exponent.
    #[error("not an exponent: {0:?}")]
    Exponent(String),
    /// An identifier (module, VOA kind, site) is not recognized.
    #[error("unknown {kind}: {value:?}")]
    Unknown {
        /// What was being parsed.
        kind: &'static str,
        /// The offending text.
        value: String,
    },
}
