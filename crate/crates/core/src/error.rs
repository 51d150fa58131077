use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("jet truncation too small: term needs order {required}, context has {available}")]
    TruncationTooSmall { required: usize, available: usize },

    #[error("slot X{slot} is not of differential order 0; trace/composition is not defined")]
    OrderZeroViolation { slot: usize },

    #[error("not a quasi-symmetry: the symbol times the group-ring element is nonzero")]
    NotQuasiSymmetry,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at {start}..{end}: {message} (expected one of: {})", expected.join(", "))]
    Parse {
        start: usize,
        end: usize,
        message: String,
        expected: Vec<String>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
