//! Arithmetic modulo the Mersenne prime 2^61 - 1 and Gaussian elimination.
//!
//! 2^61 - 1 is the largest prime below 2^61. Products fit in `u128` and
//! reduce with two shifts, which keeps elimination cheap. A random row
//! combination collides with a fixed nonzero polynomial of degree `k` with
//! probability at most `k / p`, about `k * 2^-61`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

pub const MODULUS: u64 = (1 << 61) - 1;

/// An element of the prime field of order [`MODULUS`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    /// Reduces any `u64` into the field.
    pub fn new(v: u64) -> Self {
        Fp(reduce64(v))
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            -Fp::new(v.unsigned_abs())
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Fp> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(MODULUS - 2))
        }
    }
}

#[inline]
fn reduce64(v: u64) -> u64 {
    let r = (v & MODULUS) + (v >> 61);
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

#[inline]
fn reduce128(v: u128) -> u64 {
    let lo = (v as u64) & MODULUS;
    let hi = (v >> 61) as u64;
    // hi < 2^61 because v < 2^122
    reduce64(lo + hi)
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(self.0 + MODULUS - rhs.0)
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(MODULUS - self.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        Fp(reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

/// `row -= factor * other`, over the common prefix.
#[inline]
fn axpy_neg(row: &mut [Fp], factor: Fp, other: &[Fp]) {
    for (a, &b) in row.iter_mut().zip(other) {
        if !b.is_zero() {
            *a -= factor * b;
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("row length {got} does not match {cols} columns")]
    RowLength { got: usize, cols: usize },
}

/// Row-major dense matrix over [`Fp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Fp>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Fp::ZERO; rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Fp>]) -> Result<Self, LinalgError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::RowLength { got: r.len(), cols });
            }
            entries.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Fp] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fp] {
        &mut self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Fp {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fp) {
        self.entries[i * self.cols + j] = v;
    }

    /// Rank over the prime field.
    pub fn rank(&self) -> usize {
        eliminate_in_place(self.entries.clone(), self.rows, self.cols)
    }

    /// Rank of the submatrix formed by the selected rows (duplicates allowed).
    pub fn rank_of_rows(&self, rows: &[usize]) -> Result<usize, LinalgError> {
        let mut buf = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            if i >= self.rows {
                return Err(LinalgError::RowOutOfRange {
                    index: i,
                    rows: self.rows,
                });
            }
            buf.extend_from_slice(self.row(i));
        }
        Ok(eliminate_in_place(buf, rows.len(), self.cols))
    }
}

/// Forward elimination on an owned row-major buffer; pivots are the first
/// nonzero entry found in each column.
fn eliminate_in_place(mut a: Vec<Fp>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in col..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = a[rank * cols + col].inv().expect("pivot is nonzero");
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        for r in 0..rows - rank - 1 {
            let row = &mut tail[r * cols..(r + 1) * cols];
            let f = row[col];
            if !f.is_zero() {
                let factor = f * inv;
                axpy_neg(&mut row[col..], factor, &pivot_row[col..]);
            }
        }
        rank += 1;
    }
    rank
}

/// Incrementally maintained echelon basis of inserted rows.
///
/// Stored rows are normalized at their pivot and every later row is zero at
/// the pivot columns of earlier ones, so reducing a vector in insertion order
/// clears all pivots. With tracking enabled each stored row also carries its
/// coefficients over the accepted input rows, which turns a zero residual into
/// an explicit linear dependency.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    rows: Vec<Vec<Fp>>,
    pivots: Vec<usize>,
    combos: Option<Vec<Vec<Fp>>>,
}

/// Outcome of reducing a vector against an [`EchelonBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// The vector is outside the span.
    Independent,
    /// The vector lies in the span. Coefficients over the accepted rows are
    /// present when tracking is enabled.
    Dependent(Option<Vec<Fp>>),
}

impl EchelonBasis {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: None,
        }
    }

    pub fn tracked(cols: usize) -> Self {
        Self {
            combos: Some(Vec::new()),
            ..Self::new(cols)
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `v` in place; returns the coefficient of every stored row used.
    fn reduce(&self, v: &mut [Fp]) -> Vec<Fp> {
        let mut lambdas = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let lambda = v[p];
            if !lambda.is_zero() {
                axpy_neg(&mut v[p..], lambda, &row[p..]);
            }
            lambdas.push(lambda);
        }
        lambdas
    }

    /// Tests membership without modifying the basis.
    pub fn classify(&self, v: &[Fp]) -> Reduction {
        assert_eq!(v.len(), self.cols);
        let mut w = v.to_vec();
        let lambdas = self.reduce(&mut w);
        if w.iter().any(|x| !x.is_zero()) {
            return Reduction::Independent;
        }
        let coeffs = self.combos.as_ref().map(|combos| {
            let mut c = vec![Fp::ZERO; self.rows.len()];
            for (lambda, combo) in lambdas.iter().zip(combos) {
                if !lambda.is_zero() {
                    for (ci, &t) in c.iter_mut().zip(combo) {
                        *ci += *lambda * t;
                    }
                }
            }
            c
        });
        Reduction::Dependent(coeffs)
    }

    /// Inserts `v` if it is independent of the stored rows; returns whether
    /// it was accepted.
    pub fn insert(&mut self, v: &[Fp]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut w = v.to_vec();
        let lambdas = self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero pivot");
        for x in &mut w[p..] {
            *x = *x * inv;
        }
        if let Some(combos) = self.combos.as_mut() {
            let k = combos.len();
            let mut t = vec![Fp::ZERO; k + 1];
            t[k] = Fp::ONE;
            for (lambda, combo) in lambdas.iter().zip(combos.iter()) {
                if !lambda.is_zero() {
                    axpy_neg(&mut t, *lambda, combo);
                }
            }
            for x in &mut t {
                *x = *x * inv;
            }
            combos.push(t);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}
