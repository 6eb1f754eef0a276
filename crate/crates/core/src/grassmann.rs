//! Finite-dimensional Grassmann algebra and Berezin integration.
//!
//! The ambient algebra for a `k`-layer, genus-`g` computation carries
//! `2gk + 2g` anticommuting generators in a fixed total order:
//!
//! ```text
//! psi(0,0), psibar(0,0), psi(0,1), …, psi(0,g-1), psibar(0,g-1),
//! psi(1,0), …, psibar(k-1,g-1),
//! alpha(0), beta(0), …, alpha(g-1), beta(g-1)
//! ```
//!
//! (layer-major for the psi sector, then one `alpha/beta` pair per cycle).
//! Elements are sparse maps from generator subsets (bitmasks over that
//! order) to rational coefficients; products pick up the parity of the
//! interleaving permutation.  Berezin integration extracts a generator from
//! the left: `∫dχ (χ_{a_1}…χ_{a_q}) = (-1)^{δ-1} χ_{a_1}…\hat0…χ_{a_q}`
//! when `χ = χ_{a_δ}`, and iterated measures apply their **rightmost**
//! factor first.
//!
//! These conventions are pinned by the one-layer Gaussian integral: for
//! `K = [[2]]`, `∫ dψ dψ̄ exp(2ψ̄ψ - αψ - ψ̄β) = 2 - αβ`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::{IntSymMatrix, Subset};
use crate::rational::Rational;

/// Most generators an ambient algebra may carry (bitmask safety margin).
pub const MAX_GENERATORS: usize = 60;

/// The ambient generator set for `layers` layers and `cycles` cycles.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Algebra {
    layers: usize,
    cycles: usize,
}

impl Algebra {
    pub fn new(layers: usize, cycles: usize) -> Result<Self> {
        let count = 2 * layers * cycles + 2 * cycles;
        if count > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(count, MAX_GENERATORS));
        }
        Ok(Algebra { layers, cycles })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn generator_count(&self) -> usize {
        2 * self.layers * self.cycles + 2 * self.cycles
    }

    /// Bit position of a generator in the canonical order.
    fn bit(&self, gen: GeneratorIndex) -> u32 {
        let pos = match gen {
            GeneratorIndex::Psi { layer, cycle } => {
                assert!(layer < self.layers && cycle < self.cycles, "generator out of range");
                2 * (layer * self.cycles + cycle)
            }
            GeneratorIndex::PsiBar { layer, cycle } => {
                assert!(layer < self.layers && cycle < self.cycles, "generator out of range");
                2 * (layer * self.cycles + cycle) + 1
            }
            GeneratorIndex::Alpha { cycle } => {
                assert!(cycle < self.cycles, "generator out of range");
                2 * self.layers * self.cycles + 2 * cycle
            }
            GeneratorIndex::Beta { cycle } => {
                assert!(cycle < self.cycles, "generator out of range");
                2 * self.layers * self.cycles + 2 * cycle + 1
            }
        };
        pos as u32
    }

    /// First bit of the alpha/beta block; everything below is psi-sector.
    pub(crate) fn pair_sector_start(&self) -> u32 {
        (2 * self.layers * self.cycles) as u32
    }

    pub(crate) fn alpha_bit(&self, cycle: usize) -> u32 {
        self.bit(GeneratorIndex::Alpha { cycle })
    }

    pub(crate) fn beta_bit(&self, cycle: usize) -> u32 {
        self.bit(GeneratorIndex::Beta { cycle })
    }

    /// The measure `D(ψ^r, ψ̄^r) = dψ_0^r dψ̄_0^r … dψ_{k-1}^r dψ̄_{k-1}^r`
    /// of one cycle.
    pub fn block_measure(&self, cycle: usize) -> Vec<GeneratorIndex> {
        assert!(cycle < self.cycles, "cycle out of range");
        (0..self.layers)
            .flat_map(|layer| {
                [
                    GeneratorIndex::Psi { layer, cycle },
                    GeneratorIndex::PsiBar { layer, cycle },
                ]
            })
            .collect()
    }

    /// The full measure `D(ψ^0, ψ̄^0) … D(ψ^{g-1}, ψ̄^{g-1})`.
    pub fn psi_measure(&self) -> Vec<GeneratorIndex> {
        (0..self.cycles)
            .flat_map(|cycle| self.block_measure(cycle))
            .collect()
    }
}

/// One anticommuting generator of the ambient algebra.  All indices are
/// zero-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum GeneratorIndex {
    /// Flux variable `ψ_layer^cycle` (integrated out).
    Psi { layer: usize, cycle: usize },
    /// Conjugate flux variable `ψ̄_layer^cycle` (integrated out).
    PsiBar { layer: usize, cycle: usize },
    /// Retained curvature variable `α^cycle`.
    Alpha { cycle: usize },
    /// Retained curvature variable `β^cycle`.
    Beta { cycle: usize },
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorIndex::Psi { layer, cycle } => write!(f, "psi({layer},{cycle})"),
            GeneratorIndex::PsiBar { layer, cycle } => write!(f, "psibar({layer},{cycle})"),
            GeneratorIndex::Alpha { cycle } => write!(f, "alpha({cycle})"),
            GeneratorIndex::Beta { cycle } => write!(f, "beta({cycle})"),
        }
    }
}

/// Parity of the permutation interleaving the generators of `b` into those
/// of `a` (all of `a` first, then all of `b`, resorted ascending).
fn merge_parity(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        swaps += (a >> (y + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps & 1 == 1
}

/// A sparse element of the Grassmann algebra: monomial bitmask → rational
/// coefficient.  Zero coefficients are never stored, so `==` is exact
/// element equality.
#[derive(Clone, PartialEq, Debug)]
pub struct GrassmannElement {
    algebra: Algebra,
    terms: HashMap<u64, Rational>,
}

impl GrassmannElement {
    pub fn zero(algebra: Algebra) -> Self {
        GrassmannElement {
            algebra,
            terms: HashMap::new(),
        }
    }

    pub fn scalar(algebra: Algebra, value: Rational) -> Self {
        let mut e = Self::zero(algebra);
        if !value.is_zero() {
            e.terms.insert(0, value);
        }
        e
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::scalar(algebra, Rational::one())
    }

    pub fn generator(algebra: Algebra, gen: GeneratorIndex) -> Self {
        let mut e = Self::zero(algebra);
        e.terms.insert(1u64 << algebra.bit(gen), Rational::one());
        e
    }

    /// The product of the listed generators in the given order (zero if any
    /// generator repeats).
    pub fn monomial(algebra: Algebra, gens: &[GeneratorIndex]) -> Self {
        let mut mask = 0u64;
        let mut parity = false;
        for &g in gens {
            let bit = 1u64 << algebra.bit(g);
            if mask & bit != 0 {
                return Self::zero(algebra); // χ² = 0
            }
            parity ^= merge_parity(mask, bit);
            mask |= bit;
        }
        let coeff = if parity {
            -Rational::one()
        } else {
            Rational::one()
        };
        let mut e = Self::zero(algebra);
        e.terms.insert(mask, coeff);
        e
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&0).cloned().unwrap_or_else(Rational::zero)
    }

    /// True when every monomial has even degree.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// Coefficient of the product of the listed (distinct) generators,
    /// relative to the order given.
    pub fn coeff(&self, gens: &[GeneratorIndex]) -> Rational {
        let mut mask = 0u64;
        let mut parity = false;
        for &g in gens {
            let bit = 1u64 << self.algebra.bit(g);
            assert!(mask & bit == 0, "repeated generator in coefficient query");
            parity ^= merge_parity(mask, bit);
            mask |= bit;
        }
        let stored = self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero);
        if parity {
            -stored
        } else {
            stored
        }
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    fn insert(&mut self, mask: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.algebra, rhs.algebra, "ambient algebras differ");
        let mut out = self.clone();
        for (&mask, coeff) in &rhs.terms {
            out.insert(mask, coeff.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        GrassmannElement {
            algebra: self.algebra,
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.algebra);
        }
        GrassmannElement {
            algebra: self.algebra,
            terms: self.terms.iter().map(|(&m, c)| (m, c * factor)).collect(),
        }
    }

    /// Graded product.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.algebra, rhs.algebra, "ambient algebras differ");
        let mut out = Self::zero(self.algebra);
        out.terms.reserve(self.terms.len().max(rhs.terms.len()));
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &rhs.terms {
                if ma & mb != 0 {
                    continue; // a repeated generator annihilates the term
                }
                let coeff = if merge_parity(ma, mb) {
                    -(ca * cb)
                } else {
                    ca * cb
                };
                out.insert(ma | mb, coeff);
            }
        }
        out
    }

    /// Exponential of an even element with zero constant term.
    ///
    /// Such an element is a finite sum of commuting, square-zero terms
    /// `c·μ`, so `exp(Σ c·μ) = Π (1 + c·μ)` exactly — the same value the
    /// nilpotent power series `Σ x^j/j!` produces, without denominators.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::ExponentConstantTerm);
        }
        if !self.is_even() {
            return Err(Error::OddExponent);
        }
        let mut out = Self::one(self.algebra);
        for (&mask, coeff) in &self.terms {
            let snapshot: Vec<(u64, Rational)> =
                out.terms.iter().map(|(&m, c)| (m, c.clone())).collect();
            for (m0, c0) in snapshot {
                if m0 & mask != 0 {
                    continue;
                }
                let add = if merge_parity(m0, mask) {
                    -(&c0 * coeff)
                } else {
                    &c0 * coeff
                };
                out.insert(m0 | mask, add);
            }
        }
        Ok(out)
    }

    /// Berezin integration in one generator, extracting from the left with
    /// sign `(-1)^{#generators before it}`.  Terms not containing the
    /// generator integrate to zero.
    pub fn berezin(&self, gen: GeneratorIndex) -> Self {
        let bit = self.algebra.bit(gen);
        let flag = 1u64 << bit;
        let below = flag - 1;
        let mut out = Self::zero(self.algebra);
        for (&mask, coeff) in &self.terms {
            if mask & flag == 0 {
                continue;
            }
            let sign_flip = (mask & below).count_ones() & 1 == 1;
            let c = if sign_flip { -coeff } else { coeff.clone() };
            out.insert(mask & !flag, c);
        }
        out
    }

    /// Iterated Berezin integral; the **rightmost** measure factor applies
    /// first, matching the written order `∫ dχ_1 dχ_2 … x`.
    pub fn berezin_multi(&self, measure: &[GeneratorIndex]) -> Self {
        measure
            .iter()
            .rev()
            .fold(self.clone(), |acc, &gen| acc.berezin(gen))
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut masks: Vec<u64> = self.terms.keys().copied().collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for (pos, mask) in masks.iter().enumerate() {
            if pos > 0 {
                write!(f, " + ")?;
            }
            let coeff = &self.terms[mask];
            if *mask == 0 {
                write!(f, "{coeff}")?;
                continue;
            }
            if coeff.is_one() {
                // bare monomial
            } else {
                write!(f, "({coeff})·")?;
            }
            let mut first = true;
            for bit in 0..64u32 {
                if mask & (1u64 << bit) == 0 {
                    continue;
                }
                if !first {
                    write!(f, "·")?;
                }
                write!(f, "{}", self.generator_at(bit))?;
                first = false;
            }
        }
        Ok(())
    }
}

impl GrassmannElement {
    fn generator_at(&self, bit: u32) -> GeneratorIndex {
        let alg = &self.algebra;
        let pos = bit as usize;
        let psi_block = 2 * alg.layers * alg.cycles;
        if pos < psi_block {
            let pair = pos / 2;
            let layer = pair / alg.cycles;
            let cycle = pair % alg.cycles;
            if pos % 2 == 0 {
                GeneratorIndex::Psi { layer, cycle }
            } else {
                GeneratorIndex::PsiBar { layer, cycle }
            }
        } else {
            let off = pos - psi_block;
            let cycle = off / 2;
            if off % 2 == 0 {
                GeneratorIndex::Alpha { cycle }
            } else {
                GeneratorIndex::Beta { cycle }
            }
        }
    }
}

/// Closed form of the one-cycle Gaussian integral with insertions:
///
/// ```text
/// ∫ D(ψ^r, ψ̄^r) (ψ̄ψ)_I · exp(ψ̄ K ψ - α^r ψ - ψ̄ β^r)
///     = det(K_{I^c}) - |adj(K_{I^c})| · α^r β^r ,
/// ```
///
/// where `K_{I^c}` keeps the layers *outside* the insertion set `I` and
/// `|·|` sums all entries.  Stated via the adjugate, the identity is
/// polynomial in the entries of `K` and therefore valid even when the
/// complementary submatrix is singular; for invertible `K_{I^c}` it equals
/// the familiar `det(K_{I^c})·(1 - |K_{I^c}^{-1}| α^r β^r)`.
pub fn wick_closed(
    algebra: Algebra,
    coupling: &IntSymMatrix,
    insertion: Subset,
    cycle: usize,
) -> GrassmannElement {
    wick_closed_inner(algebra, coupling, insertion, cycle, false)
}

/// Negative control: the same closed form with the exponent sign
/// deliberately flipped (`+ |adj| α^r β^r`).  Exists so the verification
/// sweeps can demonstrate they would catch a wrong sign convention.
pub fn wick_closed_sign_flipped(
    algebra: Algebra,
    coupling: &IntSymMatrix,
    insertion: Subset,
    cycle: usize,
) -> GrassmannElement {
    wick_closed_inner(algebra, coupling, insertion, cycle, true)
}

fn wick_closed_inner(
    algebra: Algebra,
    coupling: &IntSymMatrix,
    insertion: Subset,
    cycle: usize,
    flip_sign: bool,
) -> GrassmannElement {
    assert_eq!(coupling.size(), algebra.layers(), "coupling size != layers");
    let complement = insertion.complement(algebra.layers());
    let sub = coupling.principal_submatrix(complement);
    let det = sub.det();
    let adj_sum = sub.adjugate().entry_sum();
    let pair = GrassmannElement::monomial(
        algebra,
        &[
            GeneratorIndex::Alpha { cycle },
            GeneratorIndex::Beta { cycle },
        ],
    );
    let signed: BigInt = if flip_sign { adj_sum } else { -adj_sum };
    GrassmannElement::scalar(algebra, Rational::from(det))
        .add(&pair.scale(&Rational::from(signed)))
}

/// The exponent `ψ̄ K ψ - α^r ψ - ψ̄ β^r` of one cycle as a Grassmann
/// element.
pub fn gaussian_exponent(
    algebra: Algebra,
    coupling: &IntSymMatrix,
    cycle: usize,
) -> GrassmannElement {
    assert_eq!(coupling.size(), algebra.layers(), "coupling size != layers");
    let k = algebra.layers();
    let mut exponent = GrassmannElement::zero(algebra);
    for i in 0..k {
        for j in 0..k {
            let entry = coupling.entry(i, j);
            if num_traits::Zero::is_zero(entry) {
                continue;
            }
            let term = GrassmannElement::monomial(
                algebra,
                &[
                    GeneratorIndex::PsiBar { layer: i, cycle },
                    GeneratorIndex::Psi { layer: j, cycle },
                ],
            );
            exponent = exponent.add(&term.scale(&Rational::from(entry)));
        }
    }
    let minus_one = -Rational::one();
    for i in 0..k {
        let source = GrassmannElement::monomial(
            algebra,
            &[
                GeneratorIndex::Alpha { cycle },
                GeneratorIndex::Psi { layer: i, cycle },
            ],
        );
        let sink = GrassmannElement::monomial(
            algebra,
            &[
                GeneratorIndex::PsiBar { layer: i, cycle },
                GeneratorIndex::Beta { cycle },
            ],
        );
        exponent = exponent.add(&source.scale(&minus_one));
        exponent = exponent.add(&sink.scale(&minus_one));
    }
    exponent
}

/// Brute-force evaluation of the same Gaussian integral: build the
/// exponent, exponentiate, multiply by the insertion `(ψ̄ψ)_I`, integrate
/// every flux generator of the cycle.
pub fn wick_bruteforce(
    algebra: Algebra,
    coupling: &IntSymMatrix,
    insertion: Subset,
    cycle: usize,
) -> GrassmannElement {
    assert!(
        insertion.indices().all(|i| i < algebra.layers()),
        "insertion set out of range"
    );
    let exponent = gaussian_exponent(algebra, coupling, cycle);
    let gauss = exponent.exp().expect("exponent is even with zero constant");
    let mut insert = GrassmannElement::one(algebra);
    for i in insertion.indices() {
        let pair = GrassmannElement::monomial(
            algebra,
            &[
                GeneratorIndex::PsiBar { layer: i, cycle },
                GeneratorIndex::Psi { layer: i, cycle },
            ],
        );
        insert = insert.mul(&pair);
    }
    insert.mul(&gauss).berezin_multi(&algebra.block_measure(cycle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::factorial;

    fn alg(k: usize, g: usize) -> Algebra {
        Algebra::new(k, g).unwrap()
    }

    fn psi(layer: usize, cycle: usize) -> GeneratorIndex {
        GeneratorIndex::Psi { layer, cycle }
    }

    fn psibar(layer: usize, cycle: usize) -> GeneratorIndex {
        GeneratorIndex::PsiBar { layer, cycle }
    }

    fn alpha(cycle: usize) -> GeneratorIndex {
        GeneratorIndex::Alpha { cycle }
    }

    fn beta(cycle: usize) -> GeneratorIndex {
        GeneratorIndex::Beta { cycle }
    }

    /// Independent sign oracle: explicit bubble sort of the concatenated
    /// index lists.
    fn bubble_parity(a: u64, b: u64) -> bool {
        let mut seq: Vec<u32> = (0..64).filter(|&i| a & (1u64 << i) != 0).collect();
        seq.extend((0..64).filter(|&i| b & (1u64 << i) != 0));
        let mut swaps = 0usize;
        let n = seq.len();
        for i in 0..n {
            for j in 0..n.saturating_sub(i + 1) {
                if seq[j] > seq[j + 1] {
                    seq.swap(j, j + 1);
                    swaps += 1;
                }
            }
        }
        swaps % 2 == 1
    }

    #[test]
    fn merge_parity_matches_bubble_sort() {
        // deterministic pseudo-random masks over 20 bits
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..500 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = state & 0xfffff;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (state >> 20) & 0xfffff & !a;
            assert_eq!(merge_parity(a, b), bubble_parity(a, b), "a={a:b} b={b:b}");
        }
    }

    #[test]
    fn generator_order_is_layer_major_then_pairs() {
        let a = alg(2, 2);
        let expected = [
            psi(0, 0),
            psibar(0, 0),
            psi(0, 1),
            psibar(0, 1),
            psi(1, 0),
            psibar(1, 0),
            psi(1, 1),
            psibar(1, 1),
            alpha(0),
            beta(0),
            alpha(1),
            beta(1),
        ];
        for (pos, &gen) in expected.iter().enumerate() {
            assert_eq!(a.bit(gen), pos as u32, "generator {gen}");
        }
        assert_eq!(a.generator_count(), 12);
    }

    #[test]
    fn anticommutation_and_squares() {
        let a = alg(1, 1);
        let x = GrassmannElement::generator(a, psi(0, 0));
        let y = GrassmannElement::generator(a, psibar(0, 0));
        assert_eq!(x.mul(&y), y.mul(&x).neg());
        assert!(x.mul(&x).is_zero());
        // even elements commute
        let xy = x.mul(&y);
        let ab = GrassmannElement::monomial(a, &[alpha(0), beta(0)]);
        assert_eq!(xy.mul(&ab), ab.mul(&xy));
    }

    #[test]
    fn monomial_ordering_signs() {
        let a = alg(1, 1);
        // psibar·psi is the canonical pair psi·psibar with a sign
        let m = GrassmannElement::monomial(a, &[psibar(0, 0), psi(0, 0)]);
        assert_eq!(m.coeff(&[psi(0, 0), psibar(0, 0)]), -Rational::one());
        assert_eq!(m.coeff(&[psibar(0, 0), psi(0, 0)]), Rational::one());
        // repeated generators vanish
        assert!(GrassmannElement::monomial(a, &[alpha(0), alpha(0)]).is_zero());
    }

    #[test]
    fn zero_coefficients_are_never_stored() {
        let a = alg(1, 1);
        let x = GrassmannElement::generator(a, psi(0, 0));
        let diff = x.sub(&x);
        assert!(diff.is_zero());
        assert_eq!(diff.term_count(), 0);
        let scaled = x.scale(&Rational::zero());
        assert_eq!(scaled.term_count(), 0);
    }

    #[test]
    fn berezin_single_rules() {
        let a = alg(1, 1);
        let x = GrassmannElement::generator(a, psi(0, 0));
        let y = GrassmannElement::generator(a, psibar(0, 0));
        let xy = x.mul(&y);

        // ∫dψ ψ = 1, ∫dψ 1 = 0
        assert_eq!(x.berezin(psi(0, 0)), GrassmannElement::one(a));
        assert!(GrassmannElement::one(a).berezin(psi(0, 0)).is_zero());
        // extraction from the left: ∫dψ̄ (ψψ̄) = -ψ, ∫dψ (ψψ̄) = ψ̄
        assert_eq!(xy.berezin(psibar(0, 0)), x.neg());
        assert_eq!(xy.berezin(psi(0, 0)), y);
        // ∫dψ (κ·ψ) = (-1)^{deg κ} κ for κ = ψ̄ (odd)
        let kx = y.mul(&x);
        assert_eq!(kx.berezin(psi(0, 0)), y.neg());
    }

    #[test]
    fn berezin_multi_applies_rightmost_first() {
        let a = alg(1, 1);
        let xy = GrassmannElement::monomial(a, &[psi(0, 0), psibar(0, 0)]);
        // ∫ dψ dψ̄ (ψψ̄): dψ̄ first gives -ψ, then dψ gives -1
        let result = xy.berezin_multi(&[psi(0, 0), psibar(0, 0)]);
        assert_eq!(result, GrassmannElement::scalar(a, -Rational::one()));
        // the opposite measure order flips the sign
        let result = xy.berezin_multi(&[psibar(0, 0), psi(0, 0)]);
        assert_eq!(result, GrassmannElement::one(a));
    }

    /// Power-series exponential by nilpotency — the independent oracle for
    /// the product-form `exp`.
    fn exp_series(x: &GrassmannElement) -> GrassmannElement {
        let mut acc = GrassmannElement::one(x.algebra());
        let mut power = GrassmannElement::one(x.algebra());
        for j in 1..=64usize {
            power = power.mul(x);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&Rational::from_big(1.into(), factorial(j))));
        }
        acc
    }

    #[test]
    fn exp_product_form_matches_series() {
        let a = alg(2, 2);
        // x = ψ00ψ̄00 + 2·ψ10ψ̄10 + 3·α0β0 (even, commuting, nilpotent)
        let x = GrassmannElement::monomial(a, &[psi(0, 0), psibar(0, 0)])
            .add(&GrassmannElement::monomial(a, &[psi(1, 0), psibar(1, 0)]).scale(&Rational::from(2)))
            .add(&GrassmannElement::monomial(a, &[alpha(0), beta(0)]).scale(&Rational::from(3)));
        assert_eq!(x.exp().unwrap(), exp_series(&x));

        // a denser even element with overlapping supports
        let y = gaussian_exponent(a, &IntSymMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap(), 1);
        assert_eq!(y.exp().unwrap(), exp_series(&y));
    }

    #[test]
    fn exp_expands_commuting_pairs() {
        let a = alg(2, 1);
        // exp(χ1χ2 + χ3χ4) = 1 + χ1χ2 + χ3χ4 + χ1χ2χ3χ4
        let u = GrassmannElement::monomial(a, &[psi(0, 0), psibar(0, 0)]);
        let v = GrassmannElement::monomial(a, &[psi(1, 0), psibar(1, 0)]);
        let e = u.add(&v).exp().unwrap();
        let expected = GrassmannElement::one(a)
            .add(&u)
            .add(&v)
            .add(&u.mul(&v));
        assert_eq!(e, expected);
    }

    #[test]
    fn exp_rejects_bad_input() {
        let a = alg(1, 1);
        let odd = GrassmannElement::generator(a, psi(0, 0));
        assert_eq!(odd.exp(), Err(Error::OddExponent));
        let constant = GrassmannElement::one(a);
        assert_eq!(constant.exp(), Err(Error::ExponentConstantTerm));
    }

    #[test]
    fn exp_is_additive_on_commuting_even_elements() {
        let a = alg(2, 1);
        let u = GrassmannElement::monomial(a, &[psi(0, 0), psibar(0, 0)]).scale(&Rational::new(1, 2));
        let v = GrassmannElement::monomial(a, &[psi(1, 0), psibar(1, 0)]).scale(&Rational::from(-3));
        let lhs = u.add(&v).exp().unwrap();
        let rhs = u.exp().unwrap().mul(&v.exp().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn one_layer_gaussian_pins_all_conventions() {
        // ∫ dψ dψ̄ exp(2ψ̄ψ - αψ - ψ̄β) = 2 - αβ
        let a = alg(1, 1);
        let coupling = IntSymMatrix::from_rows(&[vec![2]]).unwrap();
        let brute = wick_bruteforce(a, &coupling, Subset::EMPTY, 0);
        let expected = GrassmannElement::scalar(a, Rational::from(2)).add(
            &GrassmannElement::monomial(a, &[alpha(0), beta(0)]).scale(&-Rational::one()),
        );
        assert_eq!(brute, expected, "got {brute}");
        assert_eq!(wick_closed(a, &coupling, Subset::EMPTY, 0), expected);
    }

    #[test]
    fn closed_form_handles_singular_complement() {
        // K invertible but K_{I^c} singular: the adjugate form still matches
        let a = alg(2, 1);
        let coupling = IntSymMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        for insertion in Subset::all(2) {
            let brute = wick_bruteforce(a, &coupling, insertion, 0);
            let closed = wick_closed(a, &coupling, insertion, 0);
            assert_eq!(brute, closed, "insertion {insertion}");
        }
    }

    #[test]
    fn full_insertion_saturates_to_one() {
        let a = alg(2, 1);
        let coupling = IntSymMatrix::from_rows(&[vec![3, 1], vec![1, 2]]).unwrap();
        let full = Subset::full(2);
        assert_eq!(
            wick_bruteforce(a, &coupling, full, 0),
            GrassmannElement::one(a)
        );
        assert_eq!(wick_closed(a, &coupling, full, 0), GrassmannElement::one(a));
    }

    #[test]
    fn sign_flipped_closed_form_differs() {
        let a = alg(2, 1);
        let coupling = IntSymMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let honest = wick_closed(a, &coupling, Subset::EMPTY, 0);
        let flipped = wick_closed_sign_flipped(a, &coupling, Subset::EMPTY, 0);
        assert_ne!(honest, flipped);
        assert_eq!(wick_bruteforce(a, &coupling, Subset::EMPTY, 0), honest);
    }

    #[test]
    fn display_is_sorted_and_readable() {
        let a = alg(1, 1);
        let e = GrassmannElement::scalar(a, Rational::from(2)).add(
            &GrassmannElement::monomial(a, &[alpha(0), beta(0)]).scale(&-Rational::one()),
        );
        assert_eq!(e.to_string(), "2 + (-1)·alpha(0)·beta(0)");
    }

    #[test]
    fn algebra_guard() {
        assert!(Algebra::new(3, 4).is_ok()); // 28 generators... 2*3*4+2*4 = 32
        assert!(Algebra::new(7, 4).is_err()); // 64 generators
    }
}
