//! Exact linear algebra over the integers and rationals.
//!
//! Coupling matrices are small symmetric integer matrices.  Everything an
//! analysis needs from them — determinants, adjugates, inverses, principal
//! submatrices, positive semidefiniteness — is computed exactly:
//!
//! * determinants by fraction-free Bareiss elimination (no rationals, no
//!   rounding, intermediate values are themselves minors);
//! * adjugates by cofactor expansion for small sizes and by `det · inverse`
//!   for larger nonsingular matrices;
//! * positive semidefiniteness by the full principal-minor criterion (all
//!   `2^k` minors, necessary *and* sufficient for symmetric matrices —
//!   leading minors alone are not);
//! * the `0 × 0` matrix is legal everywhere, with `det = 1`, empty adjugate
//!   and entry sum `0`, so complements of the full index set need no special
//!   casing downstream.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A subset of `{0, .., k-1}` stored as a bitmask.  Used for layer index
/// sets: principal submatrices, insertion sets, multi-index enumeration.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u32;
        for &i in indices {
            assert!(i < 32, "subset index out of range");
            bits |= 1 << i;
        }
        Subset(bits)
    }

    pub fn full(k: usize) -> Self {
        assert!(k <= 32);
        if k == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << k) - 1)
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Complement inside `{0, .., k-1}`.
    pub fn complement(self, k: usize) -> Self {
        Subset(Self::full(k).0 & !self.0)
    }

    /// Member indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All `2^k` subsets of `{0, .., k-1}`, in mask order.
    pub fn all(k: usize) -> impl Iterator<Item = Subset> {
        assert!(k < 32, "subset universe too large to enumerate");
        (0u32..(1u32 << k)).map(Subset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A `k × k` symmetric integer matrix; `k = 0` is legal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntSymMatrix {
    size: usize,
    entries: Vec<BigInt>, // row-major, size * size
}

impl IntSymMatrix {
    /// Builds from rows, verifying squareness and symmetry.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_big_rows(big)
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let size = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {} in a {size}-row matrix",
                    row.len()
                )));
            }
        }
        for i in 0..size {
            for j in (i + 1)..size {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(IntSymMatrix {
            size,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(size: usize) -> Self {
        let mut entries = vec![BigInt::zero(); size * size];
        for i in 0..size {
            entries[i * size + i] = BigInt::one();
        }
        IntSymMatrix { size, entries }
    }

    /// The Halperin-style coupling family `b·J + I`: `b+1` on the diagonal,
    /// `b` everywhere else.
    pub fn halperin_family(size: usize, b: i64) -> Self {
        let rows: Vec<Vec<i64>> = (0..size)
            .map(|i| (0..size).map(|j| if i == j { b + 1 } else { b }).collect())
            .collect();
        Self::from_rows(&rows).expect("family matrix is symmetric")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.size + j]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// Row sums; for symmetric matrices also the column sums (the vector
    /// `K·1`).
    pub fn row_sums(&self) -> Vec<BigInt> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.entry(i, j).clone()).sum())
            .collect()
    }

    /// Sum of all entries.
    pub fn entry_sum(&self) -> BigInt {
        self.entries.iter().sum()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.size, "vector length mismatch");
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.entry(i, j) * &v[j]).sum())
            .collect()
    }

    /// `self - identity`, the matrix whose semidefiniteness certifies the
    /// closed forms.
    pub fn minus_identity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.size {
            out.entries[i * self.size + i] -= 1;
        }
        out
    }

    /// Keeps the rows and columns indexed by `keep` (ascending).
    pub fn principal_submatrix(&self, keep: Subset) -> Self {
        let idx: Vec<usize> = keep.indices().collect();
        assert!(
            idx.iter().all(|&i| i < self.size),
            "submatrix index out of range"
        );
        let entries = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| self.entry(i, j).clone()))
            .collect();
        IntSymMatrix {
            size: idx.len(),
            entries,
        }
    }

    /// Determinant by fraction-free Bareiss elimination.  Empty matrix: 1.
    pub fn det(&self) -> BigInt {
        bareiss_det(self.size, |i, j| self.entry(i, j).clone())
    }

    /// Adjugate: `adj(M)·M = det(M)·I`.  Empty for the empty matrix, `[[1]]`
    /// for any `1 × 1` matrix.  Cofactor expansion up to size 6 (and for all
    /// singular matrices), `det · inverse` beyond.
    pub fn adjugate(&self) -> IntSymMatrix {
        let n = self.size;
        if n == 0 {
            return self.clone();
        }
        let det = self.det();
        if n <= 6 || det.is_zero() {
            let mut entries = vec![BigInt::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    // adj(M)_{ij} = (-1)^{i+j} · minor deleting row j, col i;
                    // for symmetric M this is again symmetric.
                    let minor = bareiss_det(n - 1, |r, c| {
                        let rr = if r < j { r } else { r + 1 };
                        let cc = if c < i { c } else { c + 1 };
                        self.entry(rr, cc).clone()
                    });
                    entries[i * n + j] = if (i + j) % 2 == 0 { minor } else { -minor };
                }
            }
            IntSymMatrix { size: n, entries }
        } else {
            let inv = self.inverse().expect("nonzero determinant");
            let entries = (0..n)
                .flat_map(|i| {
                    (0..n).map({
                        let det = &det;
                        let inv = &inv;
                        move |j| {
                            (inv.entry(i, j) * Rational::from(det))
                                .to_integer()
                                .expect("det · inverse has integer entries")
                        }
                    })
                })
                .collect();
            IntSymMatrix { size: n, entries }
        }
    }

    /// Exact inverse by Gauss–Jordan elimination over the rationals.
    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.size;
        let mut work = RatMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                Rational::from(self.entry(i, j))
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !work.entry(r, col).is_zero())
                .ok_or(Error::SingularMatrix)?;
            work.swap_rows(col, pivot_row);
            let pivot = work.entry(col, col).clone();
            for j in col..2 * n {
                let scaled = work.entry(col, j) / &pivot;
                work.set(col, j, scaled);
            }
            for r in 0..n {
                if r == col || work.entry(r, col).is_zero() {
                    continue;
                }
                let factor = work.entry(r, col).clone();
                for j in col..2 * n {
                    let val = work.entry(r, j) - &(&factor * work.entry(col, j));
                    work.set(r, j, val);
                }
            }
        }
        Ok(RatMatrix::from_fn(n, n, |i, j| {
            work.entry(i, j + n).clone()
        }))
    }

    /// Positive semidefiniteness via all `2^k` principal minors.
    pub fn is_psd(&self) -> bool {
        Subset::all(self.size)
            .all(|s| !self.principal_submatrix(s).det().is_negative())
    }
}

impl fmt::Display for IntSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.size {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.size {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Fraction-free Bareiss determinant of an `n × n` integer matrix given by
/// an entry callback.  All intermediate divisions are exact.
fn bareiss_det(n: usize, entry: impl Fn(usize, usize) -> BigInt) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| entry(i, j)).collect())
        .collect();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact by Sylvester's identity
            }
        }
        prev = m[k][k].clone();
    }
    let d = std::mem::take(&mut m[n - 1][n - 1]);
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// A dense rational matrix (not necessarily square or symmetric).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map({ let f = &f; move |j| f(i, j) }))
            .collect();
        RatMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn from_int(m: &IntSymMatrix) -> Self {
        Self::from_fn(m.size(), m.size(), |i, j| Rational::from(m.entry(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Sum of all entries; `0` for an empty matrix.
    pub fn entry_sum(&self) -> Rational {
        self.entries.iter().cloned().sum()
    }

    /// Column sums `C_j = Σ_i M_{ij}`.
    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.entry(i, j).clone()).sum())
            .collect()
    }

    pub fn principal_submatrix(&self, keep: Subset) -> Self {
        assert_eq!(self.rows, self.cols, "principal submatrix of a square matrix");
        let idx: Vec<usize> = keep.indices().collect();
        Self::from_fn(idx.len(), idx.len(), |i, j| {
            self.entry(idx[i], idx[j]).clone()
        })
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|t| self.entry(i, t) * other.entry(t, j))
                .sum()
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mul_int_vec(&self, v: &[BigInt]) -> Vec<Rational> {
        let rv: Vec<Rational> = v.iter().map(Rational::from).collect();
        self.mul_vec(&rv)
    }
}
