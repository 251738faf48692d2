//! Exact rational matrices: rank, kernels and positive kernel points.
//!
//! Every computation here is over `BigRational`; nothing touches floating
//! point. Rank is computed by fraction-free (Bareiss) elimination on a
//! row-scaled integer copy of the matrix. Kernels come from a plain rational
//! reduced row echelon form, which doubles as the independent second route
//! exercised by the tests.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseRationalError;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Render as `p/q`, or as a bare integer when `q == 1`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p`, `-p`, `p/q` with integer `p` and nonzero integer `q`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    let bad = || ParseRationalError(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let is_int = |t: &str| {
        let body = t.strip_prefix(['-', '+']).unwrap_or(t);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(n) || !is_int(d) {
        return Err(bad());
    }
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        RationalMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Build from integer rows. All rows must have the same length; `cols`
    /// is needed for the zero-row case.
    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            entries.extend(r.iter().map(|&x| rat(x)));
        }
        RationalMatrix { rows: rows.len(), cols, entries }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            entries.extend(r.iter().cloned());
        }
        RationalMatrix { rows: rows.len(), cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `yᵀ M`
    pub fn left_mul_vec(&self, y: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.rows, y.len());
        let mut out = vec![Rational::zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += yi * self.get(i, j);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (red, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[BigInt], b: &[i64]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, &y)| acc + x * y)
}

pub fn to_rational_vec(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

pub fn i64_to_rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Least common multiple of all denominators.
pub fn denominator_lcm(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scale a nonzero rational vector to the primitive integer vector pointing
/// the same way. The zero vector maps to the zero vector.
pub fn primitive_same_direction(v: &[Rational]) -> Vec<BigInt> {
    let l = denominator_lcm(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Primitive integer vector on the same line, first nonzero entry positive.
pub fn primitive_normalized(v: &[Rational]) -> Vec<BigInt> {
    let mut p = primitive_same_direction(v);
    if let Some(first) = p.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in p.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    p
}

/// The positive rational `c` with `v = c * primitive_same_direction(v)`.
pub fn content(v: &[Rational]) -> Rational {
    let l = denominator_lcm(v);
    let g = v
        .iter()
        .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
    Rational::new(g, l)
}

/// Rank by fraction-free elimination.
///
/// Each row is first multiplied by the lcm of its denominators, which leaves
/// the rank unchanged and gives an integer matrix. Pivot choice: the first
/// row (top to bottom) with a nonzero entry in the current column.
pub fn rank(m: &RationalMatrix) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let l = denominator_lcm(row);
            row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let mut r = 0;
    let mut prev = BigInt::one();
    for k in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][k].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            for j in (k + 1)..cols {
                let num = &pivot_row[k] * &row[j] - &row[k] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[k] = BigInt::zero();
        }
        prev = a[r][k].clone();
        r += 1;
    }
    r
}

/// Rank by plain rational Gaussian elimination.
pub fn rank_gauss(m: &RationalMatrix) -> usize {
    rref(m).1.len()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<Rational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for k in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][k].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][k].recip();
        for j in k..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i == r || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in k..cols {
                let v = &a[r][j] * &f;
                a[i][j] -= v;
            }
        }
        pivots.push(k);
        r += 1;
    }
    let entries = a.into_iter().flatten().collect();
    (RationalMatrix::new(rows, cols, entries), pivots)
}

/// Basis of `{x : Mx = 0}`: one primitive integer vector per free column,
/// first nonzero coordinate positive.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let (red, pivots) = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -red.get(row, free).clone();
        }
        basis.push(primitive_normalized(&v));
    }
    basis
}

/// Basis of `{y : yᵀM = 0}`.
pub fn left_kernel_basis(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    kernel_basis(&m.transpose())
}

/// A point `x` with `Mx = 0` and every `x_i >= 1`, if one exists.
pub fn strictly_positive_kernel_point(m: &RationalMatrix) -> Option<Vec<Rational>> {
    let n = m.cols();
    if n == 0 {
        return Some(Vec::new());
    }
    // x = 1 + y with y >= 0 turns the problem into M y = -M 1.
    let ones = vec![Rational::one(); n];
    let rhs: Vec<Rational> = m.mul_vec(&ones).into_iter().map(|x| -x).collect();
    let y = crate::simplex::feasible_point(m, &rhs)?;
    Some(y.into_iter().map(|v| v + Rational::one()).collect())
}

/// Rank of a list of integer vectors.
pub fn rank_of_vectors(vs: &[Vec<BigInt>], dim: usize) -> usize {
    let rows: Vec<Vec<Rational>> = vs.iter().map(|v| to_rational_vec(v)).collect();
    rank(&RationalMatrix::from_rows(dim, &rows))
}

/// Rows of the reduced row echelon form spanning the same space as `vs`.
pub fn row_space_basis(vs: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let (red, pivots) = rref(&RationalMatrix::from_rows(dim, vs));
    (0..pivots.len()).map(|i| red.row(i).to_vec()).collect()
}

/// Serde helpers writing rationals as `p/q` strings.
pub mod serde_rational {
    use serde::Serializer;

    use super::{format_rational, Rational};

    pub fn vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn opt_vec<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => vec(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn single<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::identity(2)), 2);
        assert_eq!(rank(&RationalMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&m(2, &[&[1, 2], &[2, 4], &[3, 6]])), 1);
        assert_eq!(rank_gauss(&m(2, &[&[1, 2], &[2, 4], &[3, 6]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RationalMatrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&m(2, &[&[1, -1]])), vec![ints(&[1, 1])]);
        let k = kernel_basis(&m(3, &[&[1, 2, 3]]));
        assert_eq!(k, vec![ints(&[2, -1, 0]), ints(&[3, 0, -1])]);
        for v in &k {
            assert_eq!(dot_int(v, &[1, 2, 3]), BigInt::zero());
        }
    }

    #[test]
    fn left_kernel_examples() {
        assert!(left_kernel_basis(&RationalMatrix::identity(3)).is_empty());
        assert_eq!(left_kernel_basis(&m(2, &[&[1, 0], &[1, 0]])), vec![ints(&[1, -1])]);
    }

    #[test]
    fn positive_point_examples() {
        assert_eq!(strictly_positive_kernel_point(&m(2, &[&[1, -1]])), Some(vec![rat(1), rat(1)]));
        assert_eq!(strictly_positive_kernel_point(&m(2, &[&[1, 1]])), None);
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3", "7/2", "-5/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        for s in ["1.5", "1/0", "", "a", "1e3", "/2"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(2, &[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RationalMatrix::identity(2));
        assert!(m(2, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn content_and_primitive() {
        let v = vec![ratio(2, 3), ratio(-4, 3)];
        assert_eq!(primitive_same_direction(&v), ints(&[1, -2]));
        assert_eq!(content(&v), ratio(2, 3));
        assert_eq!(primitive_normalized(&[rat(-2), rat(4)]), ints(&[1, -2]));
    }
}
