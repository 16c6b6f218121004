use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} has no multiplicative inverse")]
    NoInverse(u32),
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u32, modulus: u32 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("field mismatch: q={left} vs q={right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("graph too large: {requested} vertices exceeds limit {limit}")]
    TooLarge { requested: u64, limit: usize },
    #[error("relation is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("graph is not regular")]
    NotRegular,
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("work budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("VC search budget of {budget} exceeded; certified lower bound {lower_bound}")]
    VcBudgetExceeded { budget: u64, lower_bound: usize },
    #[error("polynomial parse error: {0}")]
    Polynomial(String),
    #[error("cache format error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
