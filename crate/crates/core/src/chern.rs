//! The two independent pipelines that evaluate the Chern character of a
//! multilayer bundle, plus the collector that turns a Grassmann-valued
//! integral into rational coefficients.
//!
//! For a `k`-layer state with coupling matrix `K` on a genus-`g` surface,
//! the character is a vector `(c_0, …, c_g)`; `c_0` is the rank of the
//! bundle (ground-state degeneracy) and `-c_1/c_0` the Hall conductance.
//!
//! * [`ch_bruteforce`] realizes the index-density integral literally: one
//!   layer factor per layer, one Gaussian weight per cycle, Berezin
//!   integration over every flux generator, then [`theta_collect`].
//! * [`ch_closed_form`] evaluates the same sum after performing each
//!   cycle's Gaussian integral symbolically, leaving a finite sum over
//!   insertion patterns weighted by subdeterminants and adjugate sums.
//!
//! The two routes share no linear algebra beyond the coupling matrix
//! itself, so their coefficient-by-coefficient agreement (exercised
//! exhaustively by the acceptance suite) is a genuine cross-check.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{Algebra, GeneratorIndex, GrassmannElement};
use crate::linalg::{IntSymMatrix, Subset};
use crate::rational::Rational;
use crate::series::{factorial, falling_binomial, layer_binomial};

/// Hard ceiling on ambient generators for the brute-force pipeline
/// (`2gk + 2g`); beyond this the dense expansion is no longer tractable.
pub const BRUTEFORCE_GENERATOR_LIMIT: usize = 34;

/// The Chern character of a bundle on a genus-`g` surface: coefficients
/// `c_0 … c_g` of the successive powers of the symplectic class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChernCharacter {
    coeffs: Vec<Rational>,
}

impl ChernCharacter {
    /// Wraps an explicit coefficient vector `(c_0, …, c_g)`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a character has at least c_0");
        ChernCharacter { coeffs }
    }

    /// The zero class on a genus-`genus` surface.
    pub fn zero(genus: usize) -> Self {
        ChernCharacter {
            coeffs: vec![Rational::zero(); genus + 1],
        }
    }

    pub fn genus(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `c_m` (zero beyond the stored range).
    pub fn coeff(&self, m: usize) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// The rank `c_0` — the ground-state degeneracy.
    pub fn rank(&self) -> Rational {
        self.coeffs[0].clone()
    }

    /// The rank as an integer, when it is one (it always is for bundles
    /// produced by the pipelines).
    pub fn rank_integer(&self) -> Option<BigInt> {
        self.coeffs[0].to_integer()
    }

    /// Hall conductance `-c_1/c_0`, in units of `e^2/h`.
    pub fn conductance(&self) -> Result<Rational> {
        if self.genus() == 0 {
            return Err(Error::Precondition(
                "conductance needs a degree-one coefficient (genus >= 1)".into(),
            ));
        }
        if self.coeffs[0].is_zero() {
            return Err(Error::RankZero);
        }
        Ok(-&self.coeffs[1] / &self.coeffs[0])
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Collects a fully integrated Grassmann element — supported on the
/// `alpha/beta` pair sector only — into a [`ChernCharacter`].
///
/// Writing `θ_r = α^r β^r`, a symmetric class has the shape
/// `Σ_F coeff_{|F|} · θ^F` with one common coefficient per degree and every
/// degree-`m` subset present; the character coefficient is then
/// `c_m = coeff_m / m!` (because `θ^m = m! Σ_{|F|=m} θ^F`).
///
/// Fails with [`Error::UnpairedGenerators`] if a flux generator survives or
/// an `α` appears without its `β`, and [`Error::NonUniformCoefficients`]
/// if the degree-`m` coefficients disagree across subsets (including a
/// coefficient that vanishes for some subsets only).
pub fn theta_collect(element: &GrassmannElement) -> Result<ChernCharacter> {
    let algebra = element.algebra();
    let genus = algebra.cycles();
    let start = algebra.pair_sector_start();
    let flux_mask: u64 = (1u64 << start) - 1;

    // degree -> (cycle subset -> coefficient)
    let mut by_degree: BTreeMap<usize, BTreeMap<u32, Rational>> = BTreeMap::new();
    for (mask, coeff) in element.raw_terms() {
        if mask & flux_mask != 0 {
            return Err(Error::UnpairedGenerators(
                "flux generators remain after integration".into(),
            ));
        }
        let mut cycles = 0u32;
        for r in 0..genus {
            let has_alpha = mask >> algebra.alpha_bit(r) & 1 == 1;
            let has_beta = mask >> algebra.beta_bit(r) & 1 == 1;
            if has_alpha != has_beta {
                return Err(Error::UnpairedGenerators(format!(
                    "alpha({r})/beta({r}) appear without their partner"
                )));
            }
            if has_alpha {
                cycles |= 1 << r;
            }
        }
        let degree = cycles.count_ones() as usize;
        by_degree
            .entry(degree)
            .or_default()
            .insert(cycles, coeff.clone());
    }

    let mut coeffs = vec![Rational::zero(); genus + 1];
    for (degree, subsets) in by_degree {
        let expected = falling_binomial(genus as i64, degree as i64)
            .to_usize()
            .expect("subset count fits in usize");
        let common = subsets.values().next().cloned().unwrap_or_else(Rational::zero);
        let uniform =
            subsets.len() == expected && subsets.values().all(|c| *c == common);
        if !uniform {
            let details = subsets
                .iter()
                .map(|(bits, c)| format!("{}: {c}", Subset::from_bits(*bits)))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::NonUniformCoefficients {
                degree,
                details: format!(
                    "{} of {expected} subsets present ({details})",
                    subsets.len()
                ),
            });
        }
        coeffs[degree] = common / Rational::from(factorial(degree));
    }
    Ok(ChernCharacter::new(coeffs))
}

fn check_layer_data(
    coupling: &IntSymMatrix,
    quasiholes: &[i64],
    particles: &[i64],
) -> Result<usize> {
    let k = coupling.size();
    if quasiholes.len() != k || particles.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {k}x{k} but got {} quasi-hole and {} particle entries",
            quasiholes.len(),
            particles.len()
        )));
    }
    Ok(k)
}

/// Brute-force pipeline: build the index density inside the Grassmann
/// algebra and integrate it literally.
///
/// Each layer contributes `f_i = Σ_{R ⊆ cycles} B_i(|R|) Π_{r∈R} ψ̄_i^r ψ_i^r`
/// with `B_i` the layer coefficients for `(n_i, g, p_i)`; each cycle
/// contributes the Gaussian weight `exp(ψ̄ K ψ - α^r ψ - ψ̄ β^r)`.  The
/// product is integrated over every flux generator and collected.
///
/// Refuses inputs needing more than [`BRUTEFORCE_GENERATOR_LIMIT`]
/// generators.
pub fn ch_bruteforce(
    coupling: &IntSymMatrix,
    genus: usize,
    quasiholes: &[i64],
    particles: &[i64],
) -> Result<ChernCharacter> {
    let k = check_layer_data(coupling, quasiholes, particles)?;
    let count = 2 * genus * k + 2 * genus;
    if count > BRUTEFORCE_GENERATOR_LIMIT {
        return Err(Error::TooManyGenerators(count, BRUTEFORCE_GENERATOR_LIMIT));
    }
    let algebra = Algebra::new(k, genus)?;

    let mut density = GrassmannElement::one(algebra);
    for i in 0..k {
        let table: Vec<BigInt> = (0..=genus as i64)
            .map(|a| layer_binomial(particles[i], genus as i64, quasiholes[i], a))
            .collect();
        let mut factor = GrassmannElement::zero(algebra);
        for bits in 0..(1u32 << genus) {
            let size = bits.count_ones() as usize;
            if table[size].is_zero() {
                continue;
            }
            let gens: Vec<GeneratorIndex> = (0..genus)
                .filter(|r| bits >> r & 1 == 1)
                .flat_map(|cycle| {
                    [
                        GeneratorIndex::PsiBar { layer: i, cycle },
                        GeneratorIndex::Psi { layer: i, cycle },
                    ]
                })
                .collect();
            let monomial = GrassmannElement::monomial(algebra, &gens);
            factor = factor.add(&monomial.scale(&Rational::from(&table[size])));
        }
        density = density.mul(&factor);
        if density.is_zero() {
            return Ok(ChernCharacter::zero(genus));
        }
    }
    for cycle in 0..genus {
        let weight = crate::grassmann::gaussian_exponent(algebra, coupling, cycle)
            .exp()
            .expect("Gaussian exponent is even with zero constant term");
        density = density.mul(&weight);
    }
    let integrated = density.berezin_multi(&algebra.psi_measure());
    theta_collect(&integrated)
}

/// Closed form for the incompressible case (no quasi-holes): for
/// invertible `K`,
///
/// ```text
/// c_m = det(K)^g · (-|K^{-1}|)^m / m!
/// ```
///
/// computed integrally as `(-1)^m det(K)^{g-m} |adj(K)|^m / m!`.
pub fn ch_incompressible(coupling: &IntSymMatrix, genus: usize) -> Result<ChernCharacter> {
    let det = coupling.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let adj_sum = coupling.adjugate().entry_sum();
    let coeffs = (0..=genus)
        .map(|m| {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let numer: BigInt =
                sign * det.pow((genus - m) as u32) * adj_sum.pow(m as u32);
            Rational::from_big(numer, factorial(m))
        })
        .collect();
    Ok(ChernCharacter::new(coeffs))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ExponentSign {
    Honest,
    Flipped,
}

/// Closed-form pipeline for arbitrary quasi-hole vectors.
///
/// After the per-cycle Gaussian integrals are done symbolically, each cycle
/// `r` carrying insertion set `I_r` is worth
/// `det(K_{I_r^c}) - |adj(K_{I_r^c})| θ_r`, so
///
/// ```text
/// c_m = (-1)^m (g-m)! Σ_{v,w} Π_I  |adj(K_{I^c})|^{v_I} det(K_{I^c})^{w_I}
///                                  ───────────────────────────────────────  Π_i B_i(a_i)
///                                              v_I! · w_I!
/// ```
///
/// summed over functions `v, w : subsets → ℕ` with `Σv = m`, `Σw = g-m`,
/// and `a_i = Σ_{I∋i} (v_I + w_I)`.  The `B_i` are the same layer
/// coefficients the brute-force pipeline uses, so the two agree exactly.
pub fn ch_closed_form(
    coupling: &IntSymMatrix,
    genus: usize,
    quasiholes: &[i64],
    particles: &[i64],
) -> Result<ChernCharacter> {
    ch_closed_form_inner(coupling, genus, quasiholes, particles, ExponentSign::Honest)
}

/// Negative control: identical to [`ch_closed_form`] except the adjugate
/// sum enters with the opposite sign.  The verification sweeps use it to
/// prove they would detect a sign error.
pub fn ch_closed_form_sign_flipped(
    coupling: &IntSymMatrix,
    genus: usize,
    quasiholes: &[i64],
    particles: &[i64],
) -> Result<ChernCharacter> {
    ch_closed_form_inner(coupling, genus, quasiholes, particles, ExponentSign::Flipped)
}

fn ch_closed_form_inner(
    coupling: &IntSymMatrix,
    genus: usize,
    quasiholes: &[i64],
    particles: &[i64],
    sign: ExponentSign,
) -> Result<ChernCharacter> {
    let k = check_layer_data(coupling, quasiholes, particles)?;
    if quasiholes.iter().any(|&p| p < 0) {
        // every layer coefficient of a negative-quasi-hole layer vanishes
        return Ok(ChernCharacter::zero(genus));
    }

    // per-subset data for the complements
    let subset_count = 1usize << k;
    let mut det_c = Vec::with_capacity(subset_count);
    let mut adj_sum_c = Vec::with_capacity(subset_count);
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(subset_count);
    for bits in 0..subset_count as u32 {
        let insertion = Subset::from_bits(bits);
        let sub = coupling.principal_submatrix(insertion.complement(k));
        det_c.push(sub.det());
        adj_sum_c.push(sub.adjugate().entry_sum());
        members.push(insertion.indices().collect());
    }

    // layer coefficients B_i(a) for a = 0..=g
    let table: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..=genus as i64)
                .map(|a| layer_binomial(particles[i], genus as i64, quasiholes[i], a))
                .collect()
        })
        .collect();

    struct Ctx<'a> {
        subset_count: usize,
        det_c: &'a [BigInt],
        adj_sum_c: &'a [BigInt],
        members: &'a [Vec<usize>],
        quasiholes: &'a [i64],
        table: &'a [Vec<BigInt>],
    }

    fn recurse(
        ctx: &Ctx<'_>,
        subset: usize,
        rem_v: usize,
        rem_w: usize,
        counts: &mut [i64],
        acc: Rational,
        total: &mut Rational,
    ) {
        if subset == ctx.subset_count {
            if rem_v != 0 || rem_w != 0 {
                return;
            }
            let mut term = acc;
            for (i, &a) in counts.iter().enumerate() {
                let b = &ctx.table[i][a as usize];
                if b.is_zero() {
                    return;
                }
                term *= &Rational::from(b);
            }
            *total += term;
            return;
        }
        let adj = &ctx.adj_sum_c[subset];
        let det = &ctx.det_c[subset];
        for dv in 0..=rem_v {
            if dv > 0 && adj.is_zero() {
                break;
            }
            for dw in 0..=rem_w {
                if dw > 0 && det.is_zero() {
                    break;
                }
                let bump = (dv + dw) as i64;
                if bump > 0
                    && ctx.members[subset]
                        .iter()
                        .any(|&i| counts[i] + bump > ctx.quasiholes[i])
                {
                    // B_i vanishes beyond a_i = p_i, so deeper dv/dw only
                    // grow the excess
                    break;
                }
                let factor = Rational::from_big(
                    adj.pow(dv as u32) * det.pow(dw as u32),
                    factorial(dv) * factorial(dw),
                );
                for &i in &ctx.members[subset] {
                    counts[i] += bump;
                }
                recurse(
                    ctx,
                    subset + 1,
                    rem_v - dv,
                    rem_w - dw,
                    counts,
                    &acc * &factor,
                    total,
                );
                for &i in &ctx.members[subset] {
                    counts[i] -= bump;
                }
            }
        }
    }

    let ctx = Ctx {
        subset_count,
        det_c: &det_c,
        adj_sum_c: &adj_sum_c,
        members: &members,
        quasiholes,
        table: &table,
    };
    let mut coeffs = Vec::with_capacity(genus + 1);
    for m in 0..=genus {
        let mut total = Rational::zero();
        let mut counts = vec![0i64; k];
        recurse(&ctx, 0, m, genus - m, &mut counts, Rational::one(), &mut total);
        let prefactor = match sign {
            ExponentSign::Honest if m % 2 == 1 => -Rational::one(),
            _ => Rational::one(),
        };
        coeffs.push(prefactor * Rational::from(factorial(genus - m)) * total);
    }
    Ok(ChernCharacter::new(coeffs))
}

/// Outcome of running both pipelines on the same configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub bruteforce: ChernCharacter,
    pub closed_form: ChernCharacter,
    pub agree: bool,
}

/// Runs [`ch_bruteforce`] and [`ch_closed_form`] on the same data and
/// compares them coefficient by coefficient.
pub fn verify_equivalence(
    coupling: &IntSymMatrix,
    genus: usize,
    quasiholes: &[i64],
    particles: &[i64],
) -> Result<EquivalenceReport> {
    let bruteforce = ch_bruteforce(coupling, genus, quasiholes, particles)?;
    let closed_form = ch_closed_form(coupling, genus, quasiholes, particles)?;
    let agree = bruteforce == closed_form;
    Ok(EquivalenceReport {
        bruteforce,
        closed_form,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntSymMatrix {
        IntSymMatrix::from_rows(rows).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ch(coeffs: &[Rational]) -> ChernCharacter {
        ChernCharacter::new(coeffs.to_vec())
    }

    #[test]
    fn character_accessors() {
        let c = ch(&[q(9, 1), q(-3, 1), q(1, 2)]);
        assert_eq!(c.genus(), 2);
        assert_eq!(c.rank(), q(9, 1));
        assert_eq!(c.rank_integer(), Some(9.into()));
        assert_eq!(c.conductance().unwrap(), q(1, 3));
        assert_eq!(c.coeff(5), q(0, 1));
        assert_eq!(c.to_string(), "(9, -3, 1/2)");
        assert!(ChernCharacter::zero(2).is_zero());
        assert_eq!(ChernCharacter::zero(2).conductance(), Err(Error::RankZero));
        assert!(matches!(
            ch(&[q(1, 1)]).conductance(),
            Err(Error::Precondition(_))
        ));
    }

    fn theta(algebra: Algebra, cycles: &[usize]) -> GrassmannElement {
        let gens: Vec<GeneratorIndex> = cycles
            .iter()
            .flat_map(|&cycle| {
                [
                    GeneratorIndex::Alpha { cycle },
                    GeneratorIndex::Beta { cycle },
                ]
            })
            .collect();
        GrassmannElement::monomial(algebra, &gens)
    }

    #[test]
    fn theta_collect_reads_off_coefficients() {
        // 4 - 2(θ_0 + θ_1) + θ_0θ_1  ->  (4, -2, 1/2)
        let a = Algebra::new(1, 2).unwrap();
        let elem = GrassmannElement::scalar(a, q(4, 1))
            .add(&theta(a, &[0]).scale(&q(-2, 1)))
            .add(&theta(a, &[1]).scale(&q(-2, 1)))
            .add(&theta(a, &[0, 1]));
        let c = theta_collect(&elem).unwrap();
        assert_eq!(c, ch(&[q(4, 1), q(-2, 1), q(1, 2)]));
    }

    #[test]
    fn theta_collect_zero_element() {
        let a = Algebra::new(1, 2).unwrap();
        let c = theta_collect(&GrassmannElement::zero(a)).unwrap();
        assert_eq!(c, ChernCharacter::zero(2));
    }

    #[test]
    fn theta_collect_rejects_nonuniform() {
        let a = Algebra::new(1, 2).unwrap();
        // θ_0 and θ_1 with different coefficients
        let skew = theta(a, &[0]).scale(&q(2, 1)).add(&theta(a, &[1]));
        match theta_collect(&skew) {
            Err(Error::NonUniformCoefficients { degree, .. }) => assert_eq!(degree, 1),
            other => panic!("expected non-uniform error, got {other:?}"),
        }
        // θ_0 present, θ_1 absent entirely
        let partial = GrassmannElement::one(a).add(&theta(a, &[0]));
        assert!(matches!(
            theta_collect(&partial),
            Err(Error::NonUniformCoefficients { degree: 1, .. })
        ));
    }

    #[test]
    fn theta_collect_rejects_unpaired_generators() {
        let a = Algebra::new(1, 1).unwrap();
        let alpha_only = GrassmannElement::generator(a, GeneratorIndex::Alpha { cycle: 0 });
        assert!(matches!(
            theta_collect(&alpha_only),
            Err(Error::UnpairedGenerators(_))
        ));
        let flux = GrassmannElement::generator(
            a,
            GeneratorIndex::Psi { layer: 0, cycle: 0 },
        );
        assert!(matches!(
            theta_collect(&flux),
            Err(Error::UnpairedGenerators(_))
        ));
    }

    #[test]
    fn laughlin_torus_character() {
        // one layer, K = (1), torus: ch = (1, -1)
        let k = m(&[vec![1]]);
        let expected = ch(&[q(1, 1), q(-1, 1)]);
        assert_eq!(ch_bruteforce(&k, 1, &[0], &[2]).unwrap(), expected);
        assert_eq!(ch_closed_form(&k, 1, &[0], &[2]).unwrap(), expected);
        assert_eq!(ch_incompressible(&k, 1).unwrap(), expected);
    }

    #[test]
    fn laughlin_genus_two_character() {
        // one layer, K = (3), genus 2: ch = (9, -3, 1/2)
        let k = m(&[vec![3]]);
        let expected = ch(&[q(9, 1), q(-3, 1), q(1, 2)]);
        assert_eq!(ch_incompressible(&k, 2).unwrap(), expected);
        assert_eq!(ch_closed_form(&k, 2, &[0], &[4]).unwrap(), expected);
        assert_eq!(ch_bruteforce(&k, 2, &[0], &[4]).unwrap(), expected);
    }

    #[test]
    fn two_layer_torus_character() {
        let k = m(&[vec![2, 1], vec![1, 2]]);
        let expected = ch(&[q(3, 1), q(-2, 1)]);
        assert_eq!(ch_incompressible(&k, 1).unwrap(), expected);
        assert_eq!(ch_bruteforce(&k, 1, &[0, 0], &[2, 2]).unwrap(), expected);
        assert_eq!(ch_closed_form(&k, 1, &[0, 0], &[2, 2]).unwrap(), expected);
        assert_eq!(expected.conductance().unwrap(), q(2, 3));
    }

    #[test]
    fn quasiholes_enter_both_pipelines_identically() {
        // K = [[2,1],[1,2]], torus, one quasi-hole per layer, n = (2,2):
        // B_i = (2, 1), giving ch = (21, -12) by hand
        let k = m(&[vec![2, 1], vec![1, 2]]);
        let expected = ch(&[q(21, 1), q(-12, 1)]);
        assert_eq!(ch_bruteforce(&k, 1, &[1, 1], &[2, 2]).unwrap(), expected);
        assert_eq!(ch_closed_form(&k, 1, &[1, 1], &[2, 2]).unwrap(), expected);
        assert_eq!(expected.conductance().unwrap(), q(4, 7));
    }

    #[test]
    fn negative_quasiholes_kill_the_class() {
        let k = m(&[vec![2, 1], vec![1, 2]]);
        assert!(ch_closed_form(&k, 1, &[-1, 3], &[2, 2]).unwrap().is_zero());
        assert!(ch_bruteforce(&k, 1, &[-1, 3], &[2, 2]).unwrap().is_zero());
        // deeply negative values too (no stray nonzero binomials)
        assert!(ch_closed_form(&k, 2, &[-7, 0], &[9, 9]).unwrap().is_zero());
        assert!(ch_bruteforce(&k, 2, &[-7, 0], &[9, 9]).unwrap().is_zero());
    }

    #[test]
    fn incompressible_matches_closed_form_without_quasiholes() {
        let samples = [
            m(&[vec![1]]),
            m(&[vec![3]]),
            m(&[vec![2, 1], vec![1, 2]]),
            m(&[vec![10, 3], vec![3, 2]]),
            IntSymMatrix::halperin_family(3, 1),
        ];
        for coupling in &samples {
            let k = coupling.size();
            for genus in 0..=2usize {
                let p = vec![0i64; k];
                let n = vec![2 * genus as i64 + 2; k];
                assert_eq!(
                    ch_incompressible(coupling, genus).unwrap(),
                    ch_closed_form(coupling, genus, &p, &n).unwrap(),
                    "coupling {coupling}, genus {genus}"
                );
            }
        }
    }

    #[test]
    fn incompressible_rejects_singular_coupling() {
        let k = m(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(ch_incompressible(&k, 1), Err(Error::SingularMatrix));
        // the general closed form still evaluates (to the zero class here)
        assert!(ch_closed_form(&k, 1, &[0, 0], &[2, 2]).unwrap().is_zero());
    }

    #[test]
    fn bruteforce_guard_refuses_oversized_algebras() {
        let k = IntSymMatrix::identity(4);
        match ch_bruteforce(&k, 4, &[0; 4], &[8; 4]) {
            Err(Error::TooManyGenerators(40, BRUTEFORCE_GENERATOR_LIMIT)) => {}
            other => panic!("expected generator-limit error, got {other:?}"),
        }
        // closed form has no such limit
        assert!(ch_closed_form(&k, 4, &[0; 4], &[8; 4]).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let k = m(&[vec![2, 1], vec![1, 2]]);
        assert!(matches!(
            ch_closed_form(&k, 1, &[0], &[2, 2]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            ch_bruteforce(&k, 1, &[0, 0], &[2]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn sign_flipped_control_differs_and_fails_equivalence() {
        let k = m(&[vec![2, 1], vec![1, 2]]);
        let honest = ch_closed_form(&k, 1, &[0, 0], &[2, 2]).unwrap();
        let flipped = ch_closed_form_sign_flipped(&k, 1, &[0, 0], &[2, 2]).unwrap();
        assert_ne!(honest, flipped);
        assert_eq!(ch_bruteforce(&k, 1, &[0, 0], &[2, 2]).unwrap(), honest);
    }

    #[test]
    fn equivalence_report() {
        let k = m(&[vec![3, 1], vec![1, 2]]);
        let report = verify_equivalence(&k, 2, &[1, 0], &[4, 4]).unwrap();
        assert!(report.agree);
        assert_eq!(report.bruteforce, report.closed_form);
    }

    #[test]
    fn genus_zero_is_the_sphere_count() {
        // g = 0: ch is the bare rank; with p = 0 it is det^0 = 1
        let k = m(&[vec![2, 1], vec![1, 2]]);
        let c = ch_closed_form(&k, 0, &[0, 0], &[1, 1]).unwrap();
        assert_eq!(c, ch(&[q(1, 1)]));
        assert_eq!(ch_bruteforce(&k, 0, &[0, 0], &[1, 1]).unwrap(), c);
    }
}
