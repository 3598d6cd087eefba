//! Exact rational linear algebra.
//!
//! Everything in this module works over arbitrary-precision rationals. Ranks
//! are computed by fraction-free (Bareiss) elimination on integer rows, kernels
//! by rational reduced row echelon form. Pivots are always the first nonzero
//! entry in column order, so every result is deterministic.

mod fm;

pub use fm::{
    fourier_motzkin_feasible, ConstraintSystem, Feasibility, FmError, LinearConstraint, Relation,
};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// A dense vector of rationals.
pub type RatVector = Vec<Rational>;

/// Shorthand for an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Shorthand for `numer / denom`. Panics if `denom` is zero.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Best-effort conversion to `f64` for numeric evaluation.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled division.
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Dot product of two equally long rational vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector to the primitive integer vector on the same ray:
/// denominators cleared, common factor removed, direction preserved.
pub fn primitive(v: &[Rational]) -> RatVector {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds a matrix from explicit rows. All rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<RatVector>) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            entries.extend(row);
        }
        RatMatrix {
            rows: n,
            cols,
            entries,
        }
    }

    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[RatVector]) -> Self {
        let mut m = RatMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged matrix columns");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> RatVector {
        (0..self.rows).map(|i| self.get(i, col).clone()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> RatVector {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(other.row(i));
                r
            })
            .collect();
        RatMatrix::from_rows(cols, rows)
    }

    /// Dimension of the row space, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// A basis of `{ x : self · x = 0 }`.
    pub fn nullspace(&self) -> Vec<RatVector> {
        nullspace(self)
    }

    /// Reduced row echelon form together with the pivot column of each
    /// nonzero row.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &factor * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Nonzero rows of the reduced row echelon form: a canonical basis of the
    /// row space.
    pub fn row_space_basis(&self) -> Vec<RatVector> {
        let (reduced, pivots) = self.rref();
        (0..pivots.len()).map(|i| reduced.row(i).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank by Bareiss elimination. Each row is first scaled to integers; the
/// division at every step is exact.
pub fn rank(m: &RatMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &lcm).to_integer()).collect()
        })
        .collect();
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Kernel basis in reduced echelon parametrization: one vector per free
/// column, with a 1 in that column and zeros in the other free columns.
pub fn nullspace(m: &RatMatrix) -> Vec<RatVector> {
    let (reduced, pivots) = m.rref();
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&j| !is_pivot[j])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -reduced.get(i, free).clone();
            }
            v
        })
        .collect()
}

/// Basis of the vectors (in the ambient coordinates of `kernel_basis`, of
/// dimension `dim`) that are orthogonal to every kernel basis vector and vanish
/// outside `support`.
pub fn orthogonal_complement_intersect_support(
    kernel_basis: &[RatVector],
    support: &[usize],
    dim: usize,
) -> Vec<RatVector> {
    assert!(support.iter().all(|&s| s < dim), "support index out of range");
    let restricted = RatMatrix::from_rows(
        support.len(),
        kernel_basis
            .iter()
            .map(|v| {
                assert_eq!(v.len(), dim);
                support.iter().map(|&s| v[s].clone()).collect()
            })
            .collect(),
    );
    nullspace(&restricted)
        .into_iter()
        .map(|local| {
            let mut full = vec![Rational::zero(); dim];
            for (k, &s) in support.iter().enumerate() {
                full[s] = local[k].clone();
            }
            full
        })
        .collect()
}

/// True iff `v` lies in the column span of `m`.
pub fn in_column_space(m: &RatMatrix, v: &[Rational]) -> bool {
    let col = RatMatrix::from_columns(v.len(), &[v.to_vec()]);
    rank(&m.hstack(&col)) == rank(m)
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
