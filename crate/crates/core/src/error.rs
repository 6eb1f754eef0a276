//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in exact computations.
///
/// Index violations (out-of-range layer or cycle, mismatched ambient
/// algebras) are programming errors and panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A matrix that must be invertible has determinant zero.
    #[error("matrix is singular")]
    SingularMatrix,

    /// Rows of unequal length, or a vector whose length does not match the
    /// matrix size.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix constructor received entries with M[i][j] != M[j][i].
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),

    /// Series inversion needs a unit constant term.
    #[error("series has zero constant term, cannot invert")]
    NonInvertibleSeries,

    /// Series exponential is only defined for zero constant term.
    #[error("series exponential requires zero constant term")]
    SeriesConstantTerm,

    /// Grassmann exponential of an element with an odd-degree term.
    #[error("grassmann exponential requires an even element")]
    OddExponent,

    /// Grassmann exponential of an element with a nonzero scalar part.
    #[error("grassmann exponential requires zero constant term")]
    ExponentConstantTerm,

    /// The integrated element still contains flux (psi-sector) generators,
    /// or an alpha/beta generator appears without its partner.
    #[error("element is not a polynomial in complete alpha-beta pairs: {0}")]
    UnpairedGenerators(String),

    /// Coefficients of the integrated element do not depend on the pair set
    /// through its size alone, so no theta polynomial exists.
    #[error("pair coefficients are not uniform at degree {degree}: {details}")]
    NonUniformCoefficients { degree: usize, details: String },

    /// The brute-force pipeline refuses ambient algebras above its guard.
    #[error("ambient algebra needs {0} generators, above the supported limit of {1}")]
    TooManyGenerators(usize, usize),

    /// A configuration violates a structural requirement (negative entries,
    /// non-integral data, mismatched lengths, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// Conductance of a rank-zero class is undefined.
    #[error("rank is zero, conductance undefined")]
    RankZero,

    /// An operation's mathematical precondition is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
