use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("pole at evaluation point: denominator {den} vanishes")]
    Pole { den: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("patch mismatch: {0}")]
    PatchMismatch(String),

    #[error("rank certificate failed: {0}")]
    RankDrop(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{file}:{line}:{col}: {msg}")]
    Instance {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
