use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty matrix or vector: {0}")]
    Empty(&'static str),

    #[error("reliability sequence line {line}: {reason}")]
    Sequence { line: usize, reason: String },

    #[error("reliability sequence: expected 1024 entries, found {0}")]
    SequenceLength(usize),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("row {0} of the parity-check matrix is all zero")]
    ZeroRow(usize),

    #[error("point ({0}, {1}) is not in the constellation")]
    NotInConstellation(i32, i32),

    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
