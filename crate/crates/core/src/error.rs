//! Error type shared across the crate.

/// Failures surfaced by fallible algebraic operations.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// Shapes, lengths or spaces do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A substitution would not respect the truncation order.
    #[error("ill-founded substitution: {0}")]
    IllFoundedSubstitution(String),

    /// The linear part of a formal map is not invertible.
    #[error("the linear part of the map is singular")]
    SingularLinearPart,

    /// A matrix that must be invertible is not.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// The matrix is not unipotent to the working order.
    #[error("matrix is not unipotent to the working order")]
    NotUnipotent,

    /// A series that must vanish at the origin does not.
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,

    /// A claimed Hermitian form is degenerate or not Hermitian.
    #[error("degenerate or non-Hermitian form: {0}")]
    DegenerateHermitian(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
