use thiserror::Error;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported modulus {0}: expected an odd prime with 5 <= p <= 499")]
    UnsupportedPrime(u64),
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("matrix ({a}, {b}; {c}, {d}) does not have determinant 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },
    #[error("matrix is not hyperbolic (|trace| <= 2)")]
    NotHyperbolic,
    #[error("prime {p} divides tr(A)^2 - 4")]
    RamifiedPrime { p: u32 },
    #[error("element is not in the torus")]
    NotInTorus,
    #[error("vector is zero or an eigenvector of A mod p")]
    EigenvectorInput,
    #[error("frequency vector is zero")]
    ZeroFrequency,
    #[error("torus parameter a must avoid 0 and 1")]
    DegenerateTorusPoint,
    #[error("g - I is singular")]
    SingularShift,
    #[error("no single sign fits the Heisenberg relations")]
    NoConsistentSign,
    #[error("lines are not in general position")]
    NotGeneralPosition,
    #[error("eigenspace has dimension {0}, expected 1")]
    NotOneDimensional(usize),
    #[error("product lambda * mu vanishes")]
    ZeroProduct,
    #[error("enumeration of {0} tuples exceeds the limit")]
    TooLarge(u64),
    #[error("trace {0} is not within rounding distance of an integer")]
    NonIntegralTrace(f64),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
