//! Configuration model for multilayer states and the analysis operations
//! built on top of the Chern pipelines: validity checks, the shift
//! formula, quasi-hole bookkeeping, particle-maximization diagnostics, and
//! large-field asymptotics.
//!
//! A configuration is the quadruple `(K, g, d⃗, n⃗)`: symmetric coupling
//! matrix, surface genus, per-layer magnetic flux degrees, per-layer
//! particle counts.  The derived quantity
//!
//! ```text
//! p⃗ = d⃗ − K n⃗ − (g−1) K⃗ ,     K⃗ = (K_11, …, K_kk)ᵀ (the diagonal)
//! ```
//!
//! counts non-localized quasi-holes per layer; it is always recomputed
//! from the stored fields, never cached.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::chern::{ch_closed_form, ChernCharacter};
use crate::error::{Error, Result};
use crate::linalg::{IntSymMatrix, RatMatrix};
use crate::rational::Rational;

/// A `k`-layer configuration `(K, g, d⃗, n⃗)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration {
    coupling: IntSymMatrix,
    genus: usize,
    degrees: Vec<i64>,
    particles: Vec<i64>,
}

impl Configuration {
    /// Builds a configuration, enforcing the structural invariants:
    /// matching lengths, non-negative coupling entries, non-negative
    /// degrees.  Analytic conditions (Kodaira bounds and friends) are
    /// reported by [`Configuration::validity`] instead of rejected here.
    pub fn new(
        coupling: IntSymMatrix,
        genus: usize,
        degrees: Vec<i64>,
        particles: Vec<i64>,
    ) -> Result<Self> {
        let k = coupling.size();
        if degrees.len() != k || particles.len() != k {
            return Err(Error::InvalidConfiguration(format!(
                "coupling is {k}x{k} but got {} degree and {} particle entries",
                degrees.len(),
                particles.len()
            )));
        }
        if !coupling.is_nonnegative() {
            return Err(Error::InvalidConfiguration(
                "coupling entries must be non-negative".into(),
            ));
        }
        if degrees.iter().any(|&d| d < 0) {
            return Err(Error::InvalidConfiguration(
                "degrees must be non-negative".into(),
            ));
        }
        Ok(Configuration {
            coupling,
            genus,
            degrees,
            particles,
        })
    }

    /// Same degree on every layer (the common case: one magnetic field).
    pub fn with_uniform_degree(
        coupling: IntSymMatrix,
        genus: usize,
        degree: i64,
        particles: Vec<i64>,
    ) -> Result<Self> {
        let k = coupling.size();
        Self::new(coupling, genus, vec![degree; k], particles)
    }

    /// Builds the configuration whose quasi-hole vector is exactly
    /// `quasiholes`, by deriving `d⃗ = K n⃗ + (g−1) K⃗ + p⃗`.
    pub fn from_quasiholes(
        coupling: IntSymMatrix,
        genus: usize,
        quasiholes: &[i64],
        particles: Vec<i64>,
    ) -> Result<Self> {
        let k = coupling.size();
        if quasiholes.len() != k || particles.len() != k {
            return Err(Error::InvalidConfiguration(format!(
                "coupling is {k}x{k} but got {} quasi-hole and {} particle entries",
                quasiholes.len(),
                particles.len()
            )));
        }
        let n_big: Vec<BigInt> = particles.iter().map(|&n| BigInt::from(n)).collect();
        let kn = coupling.mul_vec(&n_big);
        let gm1 = BigInt::from(genus as i64 - 1);
        let degrees: Vec<i64> = (0..k)
            .map(|i| {
                let d = &kn[i] + &gm1 * coupling.entry(i, i) + BigInt::from(quasiholes[i]);
                d.to_i64().expect("degree fits in i64")
            })
            .collect();
        Self::new(coupling, genus, degrees, particles)
    }

    pub fn coupling(&self) -> &IntSymMatrix {
        &self.coupling
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn particles(&self) -> &[i64] {
        &self.particles
    }

    pub fn layers(&self) -> usize {
        self.coupling.size()
    }

    /// The quasi-hole vector `p⃗ = d⃗ − K n⃗ − (g−1) K⃗`.
    pub fn quasiholes(&self) -> Vec<i64> {
        let n_big: Vec<BigInt> = self.particles.iter().map(|&n| BigInt::from(n)).collect();
        let kn = self.coupling.mul_vec(&n_big);
        let gm1 = BigInt::from(self.genus as i64 - 1);
        (0..self.layers())
            .map(|i| {
                let p = BigInt::from(self.degrees[i]) - &kn[i] - &gm1 * self.coupling.entry(i, i);
                p.to_i64().expect("quasi-hole count fits in i64")
            })
            .collect()
    }

    /// Evaluates the five analytic flags exactly.
    pub fn validity(&self) -> ValidityReport {
        let p = self.quasiholes();
        let g = self.genus as i64;
        ValidityReport {
            coupling_minus_identity_psd: self.coupling.minus_identity().is_psd(),
            quasiholes_nonnegative: p.iter().all(|&pi| pi >= 0),
            kodaira_bound: self
                .particles
                .iter()
                .zip(&p)
                .all(|(&ni, &pi)| pi > -(ni + 1 - g)),
            particle_constraint: self.particles.iter().all(|&ni| ni > 2 * g - 1),
            coupling_nondegenerate: !self.coupling.det().is_zero(),
        }
    }

    /// True when some `p_i < 0`, which forces the bundle rank to zero.
    pub fn rank_vanishes(&self) -> bool {
        self.quasiholes().iter().any(|&pi| pi < 0)
    }

    /// The Chern character, via the closed-form pipeline.
    pub fn chern_character(&self) -> Result<ChernCharacter> {
        ch_closed_form(
            &self.coupling,
            self.genus,
            &self.quasiholes(),
            &self.particles,
        )
    }

    /// Hall conductance `-c_1/c_0` of the configuration.
    pub fn conductance(&self) -> Result<Rational> {
        self.chern_character()?.conductance()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={}, g={}, d={:?}, n={:?}",
            self.coupling, self.genus, self.degrees, self.particles
        )
    }
}

/// The five analytic conditions of a configuration, each independently
/// testable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ValidityReport {
    /// `K − I` is positive semi-definite (checked over all principal
    /// minors).
    pub coupling_minus_identity_psd: bool,
    /// Every quasi-hole count is non-negative.
    pub quasiholes_nonnegative: bool,
    /// `p_i > −(n_i + 1 − g)` for every layer: the vanishing-theorem bound
    /// under which the fiberwise cohomology sits in degree zero.
    pub kodaira_bound: bool,
    /// `n_i > 2g − 1` for every layer.
    pub particle_constraint: bool,
    /// `det(K) ≠ 0`.
    pub coupling_nondegenerate: bool,
}

impl ValidityReport {
    /// The computed class is certified to be the Chern character of an
    /// honest vector bundle exactly when these three conditions hold.
    pub fn certified(&self) -> bool {
        self.coupling_minus_identity_psd && self.kodaira_bound && self.particle_constraint
    }

    pub fn all(&self) -> bool {
        self.certified() && self.quasiholes_nonnegative && self.coupling_nondegenerate
    }
}

/// Result of solving the shift relation `K n⃗₀ = d⃗ − (g−1) K⃗`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShiftSolution {
    /// The exact rational solution `n⃗₀`.
    pub particles: Vec<Rational>,
    /// All entries are integers.
    pub integral: bool,
    /// Integral *and* every entry satisfies `n_i > 2g − 1`.
    pub admissible: bool,
}

impl ShiftSolution {
    /// The solution as integers, when it is integral.
    pub fn integer_particles(&self) -> Option<Vec<i64>> {
        self.particles
            .iter()
            .map(|n| n.to_integer().and_then(|b| b.to_i64()))
            .collect()
    }
}

/// Solves `K n⃗₀ = d⃗ − (g−1) K⃗` exactly.  Fails on singular `K`.
pub fn solve_shift(
    coupling: &IntSymMatrix,
    genus: usize,
    degrees: &[i64],
) -> Result<ShiftSolution> {
    let k = coupling.size();
    if degrees.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {k}x{k} but got {} degree entries",
            degrees.len()
        )));
    }
    let inverse = coupling.inverse()?;
    let gm1 = BigInt::from(genus as i64 - 1);
    let target: Vec<BigInt> = (0..k)
        .map(|i| BigInt::from(degrees[i]) - &gm1 * coupling.entry(i, i))
        .collect();
    let particles = inverse.mul_int_vec(&target);
    let integral = particles.iter().all(Rational::is_integer);
    let floor = Rational::from(2 * genus as i64 - 1);
    let admissible = integral && particles.iter().all(|n| *n > floor);
    Ok(ShiftSolution {
        particles,
        integral,
        admissible,
    })
}

/// Column sums of `K⁻¹` and whether the particle-maximization guarantee
/// applies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParticleMaxReport {
    /// `C_i = Σ_j (K⁻¹)_{ji}`.
    pub column_sums: Vec<Rational>,
    /// All `C_i ≥ 0`: the shift solution maximizes the total particle
    /// number over all admissible quasi-hole additions.
    pub maximizes: bool,
}

/// Computes the `C_i` diagnostics for a coupling matrix.
pub fn particle_max_analysis(coupling: &IntSymMatrix) -> Result<ParticleMaxReport> {
    let column_sums = coupling.inverse()?.column_sums();
    let maximizes = column_sums.iter().all(|c| !c.is_negative());
    Ok(ParticleMaxReport {
        column_sums,
        maximizes,
    })
}

/// Particle-number response to adding quasi-holes at fixed degrees.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParticleDelta {
    /// `Δn⃗ = −K⁻¹ p⃗`.
    pub per_layer: Vec<Rational>,
    /// `ΔN = −Σ_i C_i p_i`, the change in total particle number.
    pub total: Rational,
}

/// How the particle vector moves when `p⃗` quasi-holes are added while the
/// degrees stay fixed: `Δn⃗ = −K⁻¹ p⃗`.
pub fn delta_n(coupling: &IntSymMatrix, quasiholes: &[i64]) -> Result<ParticleDelta> {
    let k = coupling.size();
    if quasiholes.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {k}x{k} but got {} quasi-hole entries",
            quasiholes.len()
        )));
    }
    let inverse = coupling.inverse()?;
    let p_big: Vec<BigInt> = quasiholes.iter().map(|&p| BigInt::from(p)).collect();
    let per_layer: Vec<Rational> = inverse
        .mul_int_vec(&p_big)
        .into_iter()
        .map(|x| -x)
        .collect();
    let total = per_layer.iter().cloned().sum();
    Ok(ParticleDelta { per_layer, total })
}

/// First-order large-field conductance
/// `|K⁻¹| − Σ_i (p_i / n_i) C_i²`, exact in the inputs.
pub fn asymptotic_conductance(
    coupling: &IntSymMatrix,
    particles: &[i64],
    quasiholes: &[i64],
) -> Result<Rational> {
    let k = coupling.size();
    if particles.len() != k || quasiholes.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {k}x{k} but got {} particle and {} quasi-hole entries",
            particles.len(),
            quasiholes.len()
        )));
    }
    if particles.iter().any(|&n| n <= 0) {
        return Err(Error::Precondition(
            "asymptotic conductance needs positive particle counts".into(),
        ));
    }
    let inverse = coupling.inverse()?;
    let column_sums = inverse.column_sums();
    let mut sigma = inverse.entry_sum();
    for i in 0..k {
        let ratio = Rational::new(quasiholes[i], particles[i]);
        sigma -= &(ratio * &column_sums[i] * &column_sums[i]);
    }
    Ok(sigma)
}

fn positive_column_sums(inverse: &RatMatrix) -> Result<Vec<Rational>> {
    let column_sums = inverse.column_sums();
    if column_sums.iter().any(|c| !c.is_positive()) {
        return Err(Error::Precondition(
            "requires positive column sums of the inverse coupling".into(),
        ));
    }
    Ok(column_sums)
}

/// Leading term `K⁻¹ d⃗` of the maximal particle vector for large degrees.
/// The genus enters only the lower-order terms, so it does not appear
/// here; the exact maximizer is [`max_particle_vector`].  Requires all
/// `C_i > 0`.
pub fn asymptotic_filling(coupling: &IntSymMatrix, degrees: &[i64]) -> Result<Vec<Rational>> {
    let k = coupling.size();
    if degrees.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {k}x{k} but got {} degree entries",
            degrees.len()
        )));
    }
    let inverse = coupling.inverse()?;
    positive_column_sums(&inverse)?;
    let d_big: Vec<BigInt> = degrees.iter().map(|&d| BigInt::from(d)).collect();
    Ok(inverse.mul_int_vec(&d_big))
}

/// The exact integer particle vector maximizing the total particle number
/// subject to `p⃗ ≥ 0`, found by bounded search in the box
/// `‖n⃗ − n⃗₀‖∞ ≤ max row sum of K` around the rational shift solution
/// `n⃗₀` (the solution's own quasi-hole bound makes that box sufficient).
/// Ties on the total are broken by ∞-distance to `n⃗₀`, then
/// lexicographically.  Requires all `C_i > 0`.
pub fn max_particle_vector(
    coupling: &IntSymMatrix,
    genus: usize,
    degrees: &[i64],
) -> Result<Vec<i64>> {
    let k = coupling.size();
    let inverse = coupling.inverse()?;
    positive_column_sums(&inverse)?;
    let shift = solve_shift(coupling, genus, degrees)?;
    let radius = coupling
        .row_sums()
        .iter()
        .map(|s| s.to_i64().expect("row sum fits in i64"))
        .max()
        .unwrap_or(0);

    // integer box around the rational center
    let ranges: Vec<(i64, i64)> = shift
        .particles
        .iter()
        .map(|c| {
            let floor = c.floor_i64();
            (floor - radius, floor + radius + 1)
        })
        .collect();

    let gm1 = BigInt::from(genus as i64 - 1);
    let feasible = |n: &[i64]| -> bool {
        let n_big: Vec<BigInt> = n.iter().map(|&x| BigInt::from(x)).collect();
        let kn = coupling.mul_vec(&n_big);
        (0..k).all(|i| {
            BigInt::from(degrees[i]) - &kn[i] - &gm1 * coupling.entry(i, i) >= BigInt::zero()
        })
    };
    let distance = |n: &[i64]| -> Rational {
        n.iter()
            .zip(&shift.particles)
            .map(|(&ni, c)| (Rational::from(ni) - c).abs())
            .max()
            .expect("non-empty vector")
    };

    let mut best: Option<(i64, Rational, Vec<i64>)> = None;
    let mut current = vec![0i64; k];
    fn walk(
        ranges: &[(i64, i64)],
        layer: usize,
        current: &mut Vec<i64>,
        visit: &mut impl FnMut(&[i64]),
    ) {
        if layer == ranges.len() {
            visit(current);
            return;
        }
        for v in ranges[layer].0..=ranges[layer].1 {
            current[layer] = v;
            walk(ranges, layer + 1, current, visit);
        }
    }
    walk(&ranges, 0, &mut current, &mut |n| {
        if !feasible(n) {
            return;
        }
        let total: i64 = n.iter().sum();
        let dist = distance(n);
        let better = match &best {
            None => true,
            Some((t, d, v)) => {
                total > *t || (total == *t && (dist < *d || (dist == *d && n < v.as_slice())))
            }
        };
        if better {
            best = Some((total, dist, n.to_vec()));
        }
    });
    best.map(|(_, _, n)| n).ok_or_else(|| {
        Error::Precondition("no particle vector with p⃗ ≥ 0 inside the search box".into())
    })
}
