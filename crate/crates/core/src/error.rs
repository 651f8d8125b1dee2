use thiserror::Error;

/// Errors raised by group, action, set-function and checker operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inputs with incompatible shapes: degree, dimension or modulus mismatch.
    #[error("structural error: {0}")]
    Structural(String),

    /// A configured size limit was exceeded.
    #[error("capacity exceeded: {cap} = {limit}, measured {measured}")]
    Capacity {
        cap: &'static str,
        limit: u64,
        measured: u64,
    },

    /// An argument outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural law that should hold was found broken.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Malformed text input (rationals, scenarios, permutations).
    #[error("parse error: {0}")]
    Parse(String),

    /// Input that parsed but does not describe a valid object.
    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn capacity(cap: &'static str, limit: impl TryInto<u64>, measured: impl TryInto<u64>) -> Self {
        Error::Capacity {
            cap,
            limit: limit.try_into().unwrap_or(u64::MAX),
            measured: measured.try_into().unwrap_or(u64::MAX),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
