//! Truncated power series and the coefficient-extraction closed forms.
//!
//! The geometric input to the Chern pipelines is a coefficient of the form
//!
//! ```text
//! [x^r]  td(x)^{r+1} · e^{p·x} · (td(x)/x - 1)^a ,      td(x) = x/(1 - e^{-x})
//! ```
//!
//! computed here two independent ways:
//!
//! * [`coeff_extract`] expands everything as an honest truncated series
//!   (`(td/x - 1)^a` is cleared of its pole by writing it as
//!   `(td - x)^a / x^a`, so the target is `[x^{r+a}]` of an ordinary
//!   product);
//! * [`binomial`] / [`layer_binomial`] evaluate the closed forms.
//!
//! The residue computation behind the closed form gives the generalized
//! binomial `C(r+p, r+a)` (falling-factorial form, lower entry `r+a >= 0`).
//! For `r+p > 0` this equals the symmetric form `C(r+p, p-a)` with the usual
//! vanishing rule for negative lower entries, which is how the layer
//! coefficients are normally quoted.  The two presentations part ways only
//! at non-positive upper entries (`r+p <= 0`); tests pin the series value as
//! the authoritative one there.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A dense power series truncated at a fixed order: coefficients of
/// `x^0 .. x^T` inclusive.  Binary operations between series of different
/// truncation orders truncate to the smaller order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>, // coeffs[i] = coefficient of x^i, len = order + 1
}

impl TruncatedSeries {
    /// The zero series at truncation `order`.
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// The monomial `x`, provided `order >= 1`.
    pub fn x(order: usize) -> Self {
        assert!(order >= 1, "x does not fit at order 0");
        let mut s = Self::zero(order);
        s.coeffs[1] = Rational::one();
        s
    }

    /// Builds from explicit coefficients `c_0, c_1, ..`; the truncation
    /// order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least a constant term");
        TruncatedSeries { coeffs }
    }

    /// `e^{p·x}` up to `order`.
    pub fn exp_linear(p: i64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = Rational::one(); // p^j / j!
        coeffs.push(term.clone());
        for j in 1..=order {
            term = term * Rational::new(p, j as i64);
            coeffs.push(term.clone());
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^d` (zero beyond the truncation order).
    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![Rational::zero(); order + 1];
        for i in 0..=order.min(self.order()) {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i).min(rhs.order()) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] += &(&self.coeffs[i] * &rhs.coeffs[j]);
            }
        }
        TruncatedSeries { coeffs }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let order = self.order();
        let c0 = self.coeffs[0].recip();
        let mut inv = vec![c0.clone()];
        for n in 1..=order {
            let mut acc = Rational::zero();
            for i in 1..=n {
                acc += &(&self.coeff(i) * &inv[n - i]);
            }
            inv.push(-(acc * &c0));
        }
        Ok(TruncatedSeries { coeffs: inv })
    }

    /// Exponential of a series with zero constant term, via the first-order
    /// recurrence `b_n = (1/n) Σ_{i=1..n} i·a_i·b_{n-i}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::SeriesConstantTerm);
        }
        let order = self.order();
        let mut out = vec![Rational::one()];
        for n in 1..=order {
            let mut acc = Rational::zero();
            for i in 1..=n {
                acc += &(&(Rational::from(i as i64) * self.coeff(i)) * &out[n - i]);
            }
            out.push(acc / Rational::from(n as i64));
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·x")?,
                _ => write!(f, "({c})·x^{d}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

/// The Todd series `td(x) = x / (1 - e^{-x}) = 1 + x/2 + x²/12 - x⁴/720 + …`
/// at the given truncation order, computed by inverting
/// `(1 - e^{-x})/x = Σ_j (-x)^j/(j+1)!`.
pub fn todd(order: usize) -> TruncatedSeries {
    let mut denom = Vec::with_capacity(order + 1);
    let mut term = Rational::one(); // (-1)^j / (j+1)!
    denom.push(term.clone());
    for j in 1..=order {
        term = term * Rational::new(-1, (j + 1) as i64);
        denom.push(term.clone());
    }
    TruncatedSeries { coeffs: denom }
        .inverse()
        .expect("constant term is 1")
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `(Σ parts)! / Π (parts_i!)`.
pub fn multinomial(parts: &[usize]) -> BigInt {
    let total: usize = parts.iter().sum();
    let mut acc = factorial(total);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

/// Generalized (falling-factorial) binomial `C(top, lower)` for an
/// arbitrary integer `top` and `lower >= 0`:
/// `top·(top-1)···(top-lower+1)/lower!`.  Zero for `lower < 0`.
pub fn falling_binomial(top: i64, lower: i64) -> BigInt {
    if lower < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    for t in 0..lower {
        num *= BigInt::from(top - t);
    }
    num / factorial(lower as usize)
}

/// Binomial coefficient under the vanishing convention used by the quoted
/// closed forms: **zero when the lower entry is negative or the upper entry
/// is non-positive**, otherwise the ordinary binomial.
///
/// This convention agrees with the analytic value of [`coeff_extract`]
/// whenever the upper entry is positive; at non-positive upper entries the
/// series is authoritative (see the crate-level tests pinning the mismatch
/// set).
pub fn binomial(top: i64, bottom: i64) -> BigInt {
    if bottom < 0 || top <= 0 {
        return BigInt::zero();
    }
    falling_binomial(top, bottom)
}

/// `[x^r] td(x)^{r+1} · e^{p·x} · (td(x)/x - 1)^a`, extracted from honest
/// truncated series.  Since `td(x)/x - 1 = (td(x) - x)/x` has a simple pole,
/// the computation reads `[x^{r+a}]` of
/// `td^{r+1} · e^{px} · (td - x)^a`, which needs truncation order exactly
/// `r + a`.
pub fn coeff_extract(r: usize, p: i64, a: usize) -> Rational {
    let order = r + a;
    let td = todd(order);
    let product = td
        .pow(r as u32 + 1)
        .mul(&TruncatedSeries::exp_linear(p, order));
    let product = if a == 0 {
        product
    } else {
        let td_minus_x = if order >= 1 {
            td.sub(&TruncatedSeries::x(order))
        } else {
            td.clone()
        };
        product.mul(&td_minus_x.pow(a as u32))
    };
    product.coeff(order)
}

/// The integer coefficient entering layer `i` of the closed forms:
/// zero when `p - a < 0` (the rank-vanishing convention), otherwise the
/// generalized binomial `C(n-g+p, n-g+a)`.
///
/// For `n-g+p >= 0` — in particular for every configuration with
/// non-negative quasi-hole counts — this is exactly the value the series
/// extraction `a! · coeff_extract(n-g, p, a) / a!` produces, and for
/// `n-g+p > 0` it also equals `binomial(n-g+p, p-a)` by symmetry.  Deeply
/// negative `p < -(n-g)` is clamped to zero so that a negative quasi-hole
/// count on any layer forces the zero class.
pub fn layer_binomial(n: i64, g: i64, p: i64, a: i64) -> BigInt {
    if p - a < 0 {
        return BigInt::zero();
    }
    falling_binomial(n - g + p, n - g + a)
}

/// The polynomial attached to one layer of a configuration: coefficient of
/// `x^a` is `layer_binomial(n, g, p, a) / a!`.  Its support is contained in
/// `0 ..= max(p, 0)`; it is identically zero when `p < 0` and the constant
/// `1` when `p = 0` (for `n >= g`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LayerPolynomial {
    coeffs: Vec<Rational>,
}

impl LayerPolynomial {
    /// Coefficient of `x^a` (zero beyond the stored support).
    pub fn coeff(&self, a: usize) -> Rational {
        self.coeffs.get(a).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Evaluation at an ordinary rational point (used in tests; the
    /// pipelines substitute nilpotent even elements instead).
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for LayerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·x")?,
                _ => write!(f, "({c})·x^{d}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Closed-form layer polynomial for `n` particles, genus `g`, quasi-hole
/// count `p`.
pub fn layer_polynomial(n: i64, g: i64, p: i64) -> LayerPolynomial {
    let support = p.max(0) as usize;
    let coeffs = (0..=support as i64)
        .map(|a| {
            Rational::from_big(
                layer_binomial(n, g, p, a),
                factorial(a as usize),
            )
        })
        .collect();
    LayerPolynomial { coeffs }
}

/// Independent series route to the same coefficients: coefficient of `x^a`
/// is `(1/a!) · [x^{n-g}] e^{px} · td^{n+1-g} · (td/x - 1)^a`, for
/// `a = 0 ..= max_a`.  Requires `n >= g` so the extraction degree is
/// non-negative.
pub fn layer_polynomial_series(n: i64, g: i64, p: i64, max_a: usize) -> Vec<Rational> {
    assert!(n >= g, "series extraction needs n >= g");
    let r = (n - g) as usize;
    let order = r + max_a;
    let td = todd(order);
    let base = td
        .pow((n + 1 - g) as u32)
        .mul(&TruncatedSeries::exp_linear(p, order));
    let td_minus_x = if order >= 1 {
        td.sub(&TruncatedSeries::x(order))
    } else {
        td.clone()
    };
    // after multiplying by (td - x) a times, the wanted coefficient of the
    // original Laurent product sits at degree r + a
    let mut acc = base;
    let mut out = Vec::with_capacity(max_a + 1);
    for a in 0..=max_a {
        out.push(acc.coeff(r + a) / Rational::from(&factorial(a)));
        if a < max_a {
            acc = acc.mul(&td_minus_x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn todd_low_coefficients() {
        let td = todd(8);
        assert_eq!(td.coeff(0), q(1, 1));
        assert_eq!(td.coeff(1), q(1, 2));
        assert_eq!(td.coeff(2), q(1, 12));
        assert_eq!(td.coeff(3), q(0, 1));
        assert_eq!(td.coeff(4), q(-1, 720));
        assert_eq!(td.coeff(6), q(1, 30240));
    }

    #[test]
    fn todd_odd_coefficients_vanish() {
        let td = todd(21);
        for d in (3..=21).step_by(2) {
            assert!(td.coeff(d).is_zero(), "odd coefficient x^{d}");
        }
    }

    #[test]
    fn todd_satisfies_defining_identity() {
        // td(x)·(1 - e^{-x}) == x, checked through order 20
        let order = 20;
        let minus_x = TruncatedSeries::x(order).neg();
        let one_minus_exp = TruncatedSeries::one(order).sub(&minus_x.exp().unwrap());
        let lhs = todd(order).mul(&one_minus_exp);
        assert_eq!(lhs, TruncatedSeries::x(order));
    }

    #[test]
    fn series_arithmetic_basics() {
        let e = TruncatedSeries::from_coeffs(vec![q(0, 1), q(1, 1)])
            .exp()
            .unwrap();
        assert_eq!(e.coeff(0), q(1, 1));
        assert_eq!(e.coeff(1), q(1, 1));
        // truncated at order 2? order is 1 here; rebuild at order 2
        let e2 = TruncatedSeries::from_coeffs(vec![q(0, 1), q(1, 1), q(0, 1)])
            .exp()
            .unwrap();
        assert_eq!(e2.coeff(2), q(1, 2));

        // mixed truncation orders shrink to the smaller operand
        let long = todd(10);
        let short = TruncatedSeries::one(3);
        assert_eq!(long.mul(&short).order(), 3);
        assert_eq!(long.add(&short).order(), 3);

        // exp rejects nonzero constant term, inverse rejects zero one
        assert!(TruncatedSeries::one(2).exp().is_err());
        assert!(TruncatedSeries::x(2).inverse().is_err());

        // inverse really inverts
        let inv = long.inverse().unwrap();
        assert_eq!(long.mul(&inv), TruncatedSeries::one(10));
    }

    #[test]
    fn exp_linear_matches_generic_exp() {
        let direct = TruncatedSeries::exp_linear(-3, 7);
        let mut lin = TruncatedSeries::zero(7);
        lin.coeffs[1] = q(-3, 1);
        assert_eq!(direct, lin.exp().unwrap());
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(5, 7), BigInt::from(0));
        assert_eq!(binomial(5, -1), BigInt::from(0));
        assert_eq!(binomial(0, 0), BigInt::from(0)); // vanishing convention
        assert_eq!(binomial(-2, 1), BigInt::from(0));

        assert_eq!(falling_binomial(5, 2), BigInt::from(10));
        assert_eq!(falling_binomial(0, 0), BigInt::from(1));
        assert_eq!(falling_binomial(-1, 2), BigInt::from(1));
        assert_eq!(falling_binomial(-2, 3), BigInt::from(-4));
        assert_eq!(falling_binomial(3, -1), BigInt::from(0));
        assert_eq!(falling_binomial(2, 5), BigInt::from(0));
    }

    #[test]
    fn factorials_and_multinomials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(multinomial(&[2, 1, 1]), BigInt::from(12));
        assert_eq!(multinomial(&[]), BigInt::from(1));
        assert_eq!(multinomial(&[3]), BigInt::from(1));
    }

    #[test]
    fn coeff_extract_known_values() {
        // r=0,p=0,a=0: [x^0] td = 1 — where the vanishing convention lies
        assert_eq!(coeff_extract(0, 0, 0), q(1, 1));
        // C(r+p, p-a) in the interior
        assert_eq!(coeff_extract(2, 3, 1), q(10, 1));
        assert_eq!(coeff_extract(3, 1, 2), q(0, 1));
        assert_eq!(coeff_extract(1, 1, 0), q(2, 1));
        // negative p exercises e^{px} with p < 0
        assert_eq!(
            coeff_extract(0, -1, 0),
            Rational::from(&falling_binomial(-1, 0))
        );
    }

    #[test]
    fn coeff_extract_equals_falling_binomial_everywhere() {
        for r in 0..=6usize {
            for p in -3..=6i64 {
                for a in 0..=4usize {
                    let series = coeff_extract(r, p, a);
                    let closed =
                        Rational::from(&falling_binomial(r as i64 + p, (r + a) as i64));
                    assert_eq!(series, closed, "r={r} p={p} a={a}");
                }
            }
        }
    }

    #[test]
    fn vanishing_convention_mismatches_confined_to_nonpositive_upper_entry() {
        // The quoted closed form C(r+p, p-a) with the vanishing convention
        // agrees with the series wherever the upper entry is positive; the
        // discrepancy set is exactly { r+p <= 0 with nonzero residue value }.
        let mut mismatches = Vec::new();
        for r in 0..=8usize {
            for p in -3..=8i64 {
                for a in 0..=5usize {
                    let series = coeff_extract(r, p, a);
                    let quoted = Rational::from(&binomial(r as i64 + p, p - a as i64));
                    if series != quoted {
                        mismatches.push((r, p, a));
                    }
                }
            }
        }
        assert!(!mismatches.is_empty(), "the boundary cases exist");
        for &(r, p, a) in &mismatches {
            assert!(
                r as i64 + p <= 0,
                "unexpected mismatch away from the boundary: r={r} p={p} a={a}"
            );
        }
        // and (0,0,0) is among them: the series gives 1, the convention 0
        assert!(mismatches.contains(&(0, 0, 0)));
    }

    #[test]
    fn layer_polynomial_known_values() {
        // p = 0 gives the constant 1
        assert_eq!(layer_polynomial(5, 1, 0).to_string(), "1");
        assert_eq!(layer_polynomial(4, 2, 0).to_string(), "1");
        // (n=5, g=1, p=1): C(5,1) + C(5,0)·x = 5 + x
        let f = layer_polynomial(5, 1, 1);
        assert_eq!(f.coeff(0), q(5, 1));
        assert_eq!(f.coeff(1), q(1, 1));
        assert_eq!(f.degree(), Some(1));
        // negative quasi-hole count kills the layer
        assert!(layer_polynomial(4, 2, -1).is_zero());
        assert!(layer_polynomial(6, 1, -3).is_zero());
        // support bounded by p
        let f = layer_polynomial(6, 2, 3);
        assert_eq!(f.degree(), Some(3));
        assert!(f.coeff(4).is_zero());
    }

    #[test]
    fn layer_polynomial_matches_series_route() {
        for n in 3..=8i64 {
            for g in 0..=2i64 {
                for p in 0..=4i64 {
                    let closed = layer_polynomial(n, g, p);
                    let series = layer_polynomial_series(n, g, p, (p + 2) as usize);
                    for (a, expected) in series.iter().enumerate() {
                        assert_eq!(
                            &closed.coeff(a),
                            expected,
                            "n={n} g={g} p={p} a={a}"
                        );
                    }
                }
            }
        }
    }
}
