use thiserror::Error;

use crate::field::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    DescriptorMismatch(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),
    #[error("unknown field descriptor {0:?}")]
    UnknownField(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no unique solution")]
    SingularSystem,
    #[error("system dimensions are inconsistent")]
    BadSystemShape,
    #[error("rotation must have trace -1, got {0}")]
    BadTrace(String),
    #[error("rotation must have determinant 1, got {0}")]
    BadDeterminant(String),
    #[error("rotation must not be a scalar multiple of the identity")]
    ScalarMatrix,
    #[error("vector is an eigenvector of the rotation")]
    EigenvectorInput,
    #[error("vector is zero")]
    ZeroVector,
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("operation requires an exact field, got float64")]
    FloatDescriptor,
    #[error("exhaustive check needs {pairs} pairs, budget is {budget}")]
    FieldTooLarge { pairs: u128, budget: u128 },
    #[error("operation requires a prime field, got {0}")]
    NotPrimeField(Field),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("bad scalar {text:?} for field {field}: {reason}")]
    BadScalar {
        text: String,
        field: Field,
        reason: &'static str,
    },
    #[error("decomposition has rank {0}, engine requires rank 7")]
    BadRank(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InternalInvariantViolation(msg.into())
    }
}
