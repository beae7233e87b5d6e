use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero input")]
    ZeroInput,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a unit of the ring of S-integers")]
    NotAUnit(String),
    #[error("invalid completion context: {0}")]
    InvalidContext(String),
    #[error("wrong context: {0}")]
    WrongContext(String),
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("group is not {letter}-persistent")]
    NotPersistent { letter: usize },
    #[error("word of length {len} does not reach a leaf of the domain tree")]
    WordTooShort { len: usize },
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("tree does not refine the domain tree")]
    NotARefinement,
}
