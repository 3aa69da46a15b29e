use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("not closed under bracket: {0}")]
    NotClosed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, ForgeError>;
