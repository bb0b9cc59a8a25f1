use thiserror::Error;

/// Errors raised by the calculator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("non-invertible series: constant coefficient must be +1 or -1")]
    NonInvertible,

    #[error("divergent zeta evaluation at Tate twist {0}")]
    DivergentZeta(i64),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("non-coprime invariants: gcd({rank}, {degree}) != 1")]
    NonCoprime { rank: i64, degree: i64 },

    #[error("critical parameter: stability parameter lies on a wall for these invariants")]
    Critical,

    #[error("on a wall: stability parameter is critical for these invariants")]
    OnWall,

    #[error("not a wall: stability parameter is not critical for these invariants")]
    NotAWall,

    #[error("unbounded enumeration: {0}")]
    Unbounded(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
