//! The job-file model: the JSON object an invocation reads, plus the
//! resolution rules turning it into a concrete configuration.
//!
//! Exactly one of three sources determines the particle vector:
//!
//! * `n` — given explicitly (requires `d`);
//! * `solve_shift` — derived from `K n⃗₀ = d⃗ − (g−1) K⃗` (requires `d`,
//!   must come out integral);
//! * `p` — a quasi-hole override.  With `d` present the particles solve
//!   `K n⃗ = d⃗ − p⃗ − (g−1) K⃗`; without `d` the minimal admissible
//!   particle count `n_i = 2g` is used and the degrees follow.

use serde::Deserialize;

use fqh_bundle::config::solve_shift;
use fqh_bundle::{Configuration, Error, IntSymMatrix};

pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_VERIFICATION_FAILURE: i32 = 3;

/// An error carrying its exit code and a machine-readable kind tag.
#[derive(Debug)]
pub struct CliError {
    pub exit: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_INVALID_INPUT,
            kind: "invalid-input",
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_INTERNAL,
            kind: "internal",
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            // user-correctable: bad matrices, shapes, or preconditions
            Error::NotSymmetric(..)
            | Error::DimensionMismatch(_)
            | Error::InvalidConfiguration(_)
            | Error::SingularMatrix
            | Error::TooManyGenerators(..)
            | Error::Precondition(_)
            | Error::RankZero => CliError::invalid(err.to_string()),
            // anything else escaping the library is a bug here
            other => CliError::internal(other.to_string()),
        }
    }
}

/// A scalar that means "the same value on every layer", or a per-layer
/// vector.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(i64),
    Vector(Vec<i64>),
}

impl ScalarOrVec {
    pub fn expand(&self, layers: usize, what: &str) -> Result<Vec<i64>, CliError> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![*v; layers]),
            ScalarOrVec::Vector(v) if v.len() == layers => Ok(v.clone()),
            ScalarOrVec::Vector(v) => Err(CliError::invalid(format!(
                "{what} has {} entries but K has {layers} layers",
                v.len()
            ))),
        }
    }
}

/// Degree range for the `sweep` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub d_from: i64,
    pub d_to: i64,
    #[serde(default = "default_step")]
    pub d_step: i64,
}

fn default_step() -> i64 {
    1
}

/// Bounds for the `verify` sweep, plus the deliberate-sign-flip switch
/// (the negative control proving a wrong convention would be caught).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    #[serde(default = "default_two")]
    pub max_layers: usize,
    #[serde(default = "default_two")]
    pub max_genus: usize,
    #[serde(default = "default_two_i64")]
    pub quasihole_max: i64,
    #[serde(default)]
    pub flip_sign: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            max_layers: 2,
            max_genus: 2,
            quasihole_max: 2,
            flip_sign: false,
        }
    }
}

fn default_two() -> usize {
    2
}

fn default_two_i64() -> i64 {
    2
}

fn default_genus() -> usize {
    1
}

/// One job file.  Unknown keys are rejected so typos fail loudly.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    /// Row-major symmetric coupling matrix.
    #[serde(rename = "K")]
    pub coupling: Vec<Vec<i64>>,
    /// Surface genus (default 1, the torus).
    #[serde(default = "default_genus")]
    pub g: usize,
    /// Per-layer degrees.
    #[serde(default)]
    pub d: Option<ScalarOrVec>,
    /// Explicit particle counts.
    #[serde(default)]
    pub n: Option<Vec<i64>>,
    /// Derive particle counts from the zero-quasi-hole relation.
    #[serde(default)]
    pub solve_shift: bool,
    /// Quasi-hole override.
    #[serde(default)]
    pub p: Option<ScalarOrVec>,
    /// `wick`: insertion layer set (default empty).
    #[serde(default)]
    pub insertion: Option<Vec<usize>>,
    /// `wick`: which cycle carries the flux pair (default 0).
    #[serde(default)]
    pub cycle: Option<usize>,
    /// `sweep`: degree range.
    #[serde(default)]
    pub sweep: Option<SweepRange>,
    /// `verify`: sweep bounds / negative-control switch.
    #[serde(default)]
    pub verify: Option<VerifyParams>,
}

impl JobSpec {
    pub fn coupling_matrix(&self) -> Result<IntSymMatrix, CliError> {
        if self.coupling.is_empty() {
            return Err(CliError::invalid("K must have at least one row"));
        }
        IntSymMatrix::from_rows(&self.coupling).map_err(CliError::from)
    }

    pub fn degrees(&self, layers: usize) -> Result<Option<Vec<i64>>, CliError> {
        self.d.as_ref().map(|d| d.expand(layers, "d")).transpose()
    }

    pub fn quasiholes(&self, layers: usize) -> Result<Option<Vec<i64>>, CliError> {
        self.p.as_ref().map(|p| p.expand(layers, "p")).transpose()
    }

    /// True when any of the configuration-determining fields is present —
    /// `verify` uses this to pick single-configuration mode.
    pub fn has_configuration_fields(&self) -> bool {
        self.n.is_some() || self.solve_shift || self.p.is_some() || self.d.is_some()
    }

    /// Resolves `(K, g, d⃗, n⃗)` per the particle-source rules above.
    pub fn resolve_configuration(&self) -> Result<Configuration, CliError> {
        let coupling = self.coupling_matrix()?;
        let layers = coupling.size();
        let sources =
            usize::from(self.n.is_some()) + usize::from(self.solve_shift) + usize::from(self.p.is_some());
        if sources == 0 {
            return Err(CliError::invalid(
                "one of n, solve_shift, p must determine the particle vector",
            ));
        }
        if sources > 1 {
            return Err(CliError::invalid(
                "n, solve_shift, and p are mutually exclusive",
            ));
        }

        if let Some(n) = &self.n {
            if n.len() != layers {
                return Err(CliError::invalid(format!(
                    "n has {} entries but K has {layers} layers",
                    n.len()
                )));
            }
            let d = self
                .degrees(layers)?
                .ok_or_else(|| CliError::invalid("an explicit n needs d"))?;
            Configuration::new(coupling, self.g, d, n.clone()).map_err(CliError::from)
        } else if self.solve_shift {
            let d = self
                .degrees(layers)?
                .ok_or_else(|| CliError::invalid("solve_shift needs d"))?;
            let solution = solve_shift(&coupling, self.g, &d)?;
            let n = solution.integer_particles().ok_or_else(|| {
                CliError::invalid(format!(
                    "the shift solution is not integral: n0 = ({})",
                    join(&solution.particles)
                ))
            })?;
            Configuration::new(coupling, self.g, d, n).map_err(CliError::from)
        } else {
            let p = self.quasiholes(layers)?.expect("p is the picked source");
            if let Some(d) = self.degrees(layers)? {
                // K n⃗ = d⃗ − p⃗ − (g−1) K⃗: solve at the shifted degrees
                let shifted: Vec<i64> = d.iter().zip(&p).map(|(di, pi)| di - pi).collect();
                let solution = solve_shift(&coupling, self.g, &shifted)?;
                let n = solution.integer_particles().ok_or_else(|| {
                    CliError::invalid(format!(
                        "no integral particle vector matches d and p: n = ({})",
                        join(&solution.particles)
                    ))
                })?;
                Configuration::new(coupling, self.g, d, n).map_err(CliError::from)
            } else {
                // minimal admissible particle count; degrees follow
                let n = vec![2 * self.g as i64; layers];
                Configuration::from_quasiholes(coupling, self.g, &p, n).map_err(CliError::from)
            }
        }
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
