use alloc::string::String;
use core::fmt;

/// Errors surfaced by the solvers and model builders.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Input violated the Hermitian-symmetry contract.
    NotHermitian { max_asymmetry: f64 },
    /// Cholesky factorization hit a non-positive pivot.
    NotPositiveDefinite,
    /// A matrix that must be full rank was (numerically) rank deficient.
    RankDeficient(&'static str),
    /// Operand shapes do not line up.
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// A scalar or count parameter is outside its admissible range.
    InvalidParameter { name: &'static str, reason: String },
    /// The eigensolver failed to reduce the off-diagonal mass.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            Error::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")
            }
            Error::NotPositiveDefinite => {
                write!(f, "matrix is not positive definite")
            }
            Error::RankDeficient(what) => write!(f, "rank-deficient input: {what}"),
            Error::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "dimension mismatch: expected {}x{}, got {}x{}",
                    expected.0, expected.1, got.0, got.1
                )
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::NoConvergence(what) => write!(f, "no convergence: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
