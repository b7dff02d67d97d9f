use thiserror::Error;

/// Errors raised by the exact routines.
///
/// The variants map one-to-one onto the CLI exit-code classes: domain and
/// parse problems are usage errors, guards are resource errors and the
/// consistency variants mean two exact computations disagreed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degree guard exceeded: requested degree 2^{requested_log2}, limit is 2^{limit_log2}")]
    DegreeGuard { requested_log2: u32, limit_log2: u32 },

    #[error("enumeration guard exceeded: {requested} trees requested, limit is {limit}")]
    EnumerationGuard { requested: String, limit: u64 },

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("methods disagree: {0}")]
    Disagreement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
