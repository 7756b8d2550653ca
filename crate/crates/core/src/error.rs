use thiserror::Error;

use crate::poly::Polynomial;

/// Why a linear solve could not produce a preimage.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// The target is not killed by `M`, so it cannot lie in the image of `N`.
    MNonzero(Polynomial),
    /// A power of the map is a pure translation `x_i + gamma` of one coordinate;
    /// the summed orbit of the target is not divisible by `gamma`.
    TranslationResidue { index: usize, residue: Polynomial },
    /// The target is not invariant (`N(target)` is shown), so it is not in the
    /// image of `M`.
    NotInvariant(Polynomial),
    /// No preimage was found on any truncation up to the given weighted degree.
    TruncationExhausted { degree: usize },
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certificate::MNonzero(m) => write!(f, "M(target) = {m} != 0"),
            Certificate::NotInvariant(m) => write!(f, "N(target) = {m} != 0"),
            Certificate::TranslationResidue { index, residue } => {
                write!(f, "orbit sum not divisible by the x{} increment (residue {residue})", index + 1)
            }
            Certificate::TruncationExhausted { degree } => {
                write!(f, "no preimage on truncations up to weighted degree {degree}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands live over different coefficient fields")]
    FieldMismatch,
    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("{modulus} is not a prime below 2^31")]
    InvalidPrime { modulus: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("row {row} is not triangular: {reason}")]
    NotTriangular { row: usize, reason: String },
    #[error("map is not strictly triangular (some diagonal coefficient differs from 1)")]
    NotStrictlyTriangular,
    #[error("{op} requires a field of positive characteristic")]
    CharZero { op: &'static str },
    #[error("{op} requires characteristic zero")]
    CharP { op: &'static str },
    #[error("the M operator is undefined in characteristic zero")]
    CharZeroM,
    #[error("{points} points exceed the enumeration limit {limit}")]
    TooManyPoints { points: u128, limit: u128 },
    #[error("operator image of {monomial} leaves the truncated space")]
    NotStable { monomial: String },
    #[error("no solution: {certificate}")]
    NoSolution { certificate: Box<Certificate> },
    #[error("map is not unipotent")]
    NotUnipotent,
    #[error("last component is not a nonzero translation")]
    LastComponentNotUnit,
    #[error("dimension {n} is not supported here")]
    UnsupportedDimension { n: usize },
    #[error("map does not have maximal order p^n")]
    NotMaxOrder,
    #[error("map has order {order}, not p")]
    OrderNotP { order: String },
    #[error("internal: no preimage found in row {row} ({certificate})")]
    InternalNoSolution { row: usize, certificate: Box<Certificate> },
    #[error("degree growth cap reached at weighted degree {degree}")]
    DegreeGrowthExceeded { degree: usize },
    #[error("orbit reduction needs a finite field")]
    UnsupportedField,
    #[error("map has infinite order")]
    NotFiniteOrder,
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

impl Error {
    pub(crate) fn no_solution(certificate: Certificate) -> Self {
        Error::NoSolution { certificate: Box::new(certificate) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
