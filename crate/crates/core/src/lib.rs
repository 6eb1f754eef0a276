//! Exact computation of Chern characters, degeneracies, and Hall
//! conductance for multilayer fractional quantum Hall states on higher-genus
//! surfaces.
//!
//! Everything is exact: integers are arbitrary-precision, scalars are
//! rationals, and the two independent evaluation pipelines (a brute-force
//! Grassmann-algebra realization of the index density, and closed-form
//! expressions) agree coefficient by coefficient.

pub mod chern;
pub mod config;
pub mod error;
pub mod grassmann;
pub mod guide;
pub mod linalg;
pub mod rational;
pub mod series;

pub use chern::{ChernCharacter, EquivalenceReport};
pub use config::{Configuration, ShiftSolution, ValidityReport};
pub use error::{Error, Result};
pub use grassmann::{Algebra, GeneratorIndex, GrassmannElement};
pub use linalg::{IntSymMatrix, RatMatrix, Subset};
pub use rational::Rational;
pub use series::{LayerPolynomial, TruncatedSeries};
