use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// Sort or arity mismatch; `symbol` names the offending relation, variable or parameter.
    #[error("sort error at `{symbol}`: {message}")]
    Sort { symbol: String, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid structure `{structure}`: {message}")]
    InvalidStructure { structure: String, message: String },

    #[error("arrow {arrow} is not an isomorphism: {atom}")]
    NotIsomorphism { arrow: String, atom: String },

    #[error("groupoid is not closed: missing {missing}")]
    ClosureViolation { missing: String },

    #[error("not a partial isomorphism: {atom}")]
    NotPartialIso { atom: String },

    #[error("indexing is not surjective on `{object}`: element `{element}` is not named by any parameter")]
    NotSurjective { object: String, element: String },

    #[error("{what}: count {count} exceeds cap {cap}")]
    CapExceeded {
        what: String,
        count: usize,
        cap: usize,
    },

    #[error("unsupported construct: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub fn sort(symbol: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Sort {
            symbol: symbol.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub(crate) fn cap(what: impl Into<String>, count: usize, cap: usize) -> Self {
        Error::CapExceeded {
            what: what.into(),
            count,
            cap,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
