use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed input text, located by 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Concept enumeration exceeded the caller-supplied cap.
    #[error("concept count exceeds cap of {cap}")]
    Overflow { cap: u64 },

    /// Subset oracle asked to enumerate too many atoms.
    #[error("support of {size} atoms exceeds oracle limit of {limit}")]
    SupportTooLarge { size: usize, limit: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
