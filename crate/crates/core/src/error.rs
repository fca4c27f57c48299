use std::fmt;

/// Errors produced anywhere in the box chain pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain
    /// (division by an interval containing zero, equal eigenvalues, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated a precondition (wrong dimensionality, wrong map kind, bad config).
    #[error("usage error: {0}")]
    Usage(String),

    /// A configured resource limit was hit.
    #[error("resource limit exceeded: {what} ({detail})")]
    Resource { what: ResourceKind, detail: String },

    /// A model or config file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKind {
    DepthLimit,
    MemoryBudget,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceKind::DepthLimit => f.write_str("subdivision depth limit"),
            ResourceKind::MemoryBudget => f.write_str("memory budget"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
