use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of the two maps is nonzero")]
    CompositionNonzero,
    #[error("unknown lattice name {0:?}")]
    UnknownLatticeName(String),
    #[error("zero vector has no divisibility")]
    ZeroVector,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("functional is not surjective: image is {0}Z")]
    NotSurjective(String),
    #[error("bad preset: {0}")]
    BadPreset(String),
    #[error("degree {degree} exceeds the top degree {top}")]
    DegreeOverflow { degree: usize, top: usize },
    #[error("no dual class: distinguished vector has divisibility {0}")]
    NoDualClass(String),
    #[error("index {index} out of range {min}..={max}")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },
    #[error("generators do not contain the distinguished vector")]
    MissingDistinguishedVector,
    #[error("unresolved differential d{page} at ({p},{q})")]
    UnresolvedDifferential { page: usize, p: i64, q: i64 },
    #[error("rank budget mismatch in total degree {degree}: expected {expected}, found {found}")]
    BudgetMismatch { degree: i64, expected: String, found: String },
    #[error("declared morphism at ({p},{q}) carries no provenance note")]
    MissingProvenance { p: i64, q: i64 },
    #[error("bad dimension for family: {0}")]
    BadFamilyDimension(String),
    #[error("odd number of vectors: {0}")]
    OddCount(usize),
    #[error("precondition violated: {}", .0.join("; "))]
    PreconditionViolated(Vec<String>),
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
