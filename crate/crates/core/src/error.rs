use thiserror::Error;

use crate::search::Checkpoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported maximum 65536")]
    ModulusTooLarge(u32),
    #[error("vectors must have at least one coordinate")]
    EmptyVector,
    #[error("length mismatch: expected {0}, got {1}")]
    LengthMismatch(usize, usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("duplicate cover member {0}")]
    DuplicateMember(String),
    #[error("the projective triangle needs an odd prime")]
    EvenCharacteristic,
    #[error("monomial group of order {0} exceeds the canonical-form cap")]
    OrbitTooLarge(u128),
    #[error("generators span dimension {got}, expected {expected}")]
    WrongCorank { expected: usize, got: usize },
    #[error("group of order {0} is too large for a direct element scan")]
    TooLarge(u64),
    #[error("not a C_n-cover: {0}")]
    NotACnCover(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("search space has {0} points, above the materialization limit")]
    SpaceTooLarge(u64),
    #[error("node budget exceeded after {} completed nodes; {} branches left", .0.nodes_completed, .0.frontier.len())]
    BudgetExceeded(Box<Checkpoint>),
    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),
    #[error("search produced a witness that fails verification: {0}")]
    UnsoundWitness(String),
}
