use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("field is not parity-homogeneous")]
    InhomogeneousParity,
    #[error("wrong chart flavor: {0}")]
    WrongFlavor(String),
    #[error("malformed transition: {0}")]
    MalformedTransition(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("binding error: {0}")]
    Binding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
