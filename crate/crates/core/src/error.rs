use thiserror::Error;

/// Everything that can go wrong while building or evaluating in an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("index {index} outside universe of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("degrees {degrees:?} fall outside the window |k| <= {window}")]
    WindowOverflow { degrees: Vec<i32>, window: i32 },

    #[error("invalid algebra type: {0}")]
    InvalidType(String),

    #[error("rank {rank} not allowed for {what}: {reason}")]
    InvalidRank { what: String, rank: usize, reason: String },

    #[error("{0} is not a root")]
    NotARoot(String),

    #[error("element does not belong to the algebra: {0}")]
    NotInAlgebra(String),

    #[error("form is degenerate on the truncated Cartan subalgebra")]
    SingularForm,

    #[error("interior margin {margin} is smaller than |m| = {degree}; Leibniz constraints would leak past the window")]
    MarginTooSmall { margin: i32, degree: i32 },

    #[error("interior margin {margin} exceeds the window {window}")]
    MarginTooLarge { margin: i32, window: i32 },

    #[error("target is not an eigenvector: residual {0}")]
    NotAnEigenvector(String),

    #[error("derivation does not commute with s_2: {0}")]
    NotShiftInvariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
