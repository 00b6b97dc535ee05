//! Crate-wide error type.
//!
//! Everything fallible in the library funnels into [`Error`]. The CLI maps
//! the variants onto its exit codes: I/O problems are distinguished from
//! data/validation problems, which are distinguished from usage errors
//! (the latter never reach this type — argument parsing handles them).

use thiserror::Error;

/// Errors produced by the octic engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A prime outside the supported list 2, 3, 5, ..., 97 was requested.
    #[error("unsupported prime {0}: supported primes are the 25 primes from 2 through 97")]
    UnsupportedPrime(u32),

    /// The Legendre symbol is only defined in odd characteristic.
    #[error("legendre symbol is undefined for p = 2 (use the Kronecker symbol instead)")]
    EvenCharacteristic,

    /// The zero polynomial does not define a double cover.
    #[error("degenerate octic: the zero coefficient vector is not allowed")]
    DegenerateOctic,

    /// A coefficient string such as `b=1,r=-2` failed to parse.
    #[error("invalid coefficient string {input:?}: {reason}")]
    BadCoefficients { input: String, reason: String },

    /// A newform coefficient table had a malformed or invalid line.
    #[error("{path}:{line}: {reason}")]
    BadTableLine {
        path: String,
        line: usize,
        reason: String,
    },

    /// A search range failed validation.
    #[error("invalid search range: {0}")]
    BadRange(String),

    /// A transform was applied to input outside its domain.
    #[error("transform precondition failed: {0}")]
    Precondition(String),

    /// An exact integer result does not fit the coefficient type.
    #[error("coefficient overflow: {0}")]
    Overflow(String),

    /// An eta-product specification was malformed or violates the
    /// integrality constraints.
    #[error("invalid eta product: {0}")]
    BadEtaSpec(String),

    /// A newform record is malformed or out of bounds.
    #[error("invalid newform record: {0}")]
    BadNewform(String),

    /// A cached count table failed its format or consistency checks.
    #[error("cache file {path}: {reason}")]
    BadCache { path: String, reason: String },

    /// A checkpoint file is unusable or belongs to a different search.
    #[error("checkpoint {path}: {reason}")]
    BadCheckpoint { path: String, reason: String },

    /// An I/O error, annotated with what was being attempted.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Helper for wrapping an I/O error with context.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors that stem from the filesystem rather than from data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
