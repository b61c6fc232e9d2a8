use thiserror::Error;

/// Errors raised by the number-theoretic and tree operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// `a` has no inverse modulo `m`.
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: String, m: String },

    /// A structural invariant failed; the input was not what it claimed to be.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The hypotheses of a theorem-backed operation were not met.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Factorization ran out of budget where a complete one was required.
    #[error("incomplete factorization of {0}")]
    IncompleteFactorization(String),

    /// A residue set would exceed the enumeration cap.
    #[error("too many solutions: {0}")]
    TooManySolutions(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
