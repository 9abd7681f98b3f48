//! Exact integer linear algebra: matrices over arbitrary-precision integers,
//! Smith normal form with change of basis, saturation tests, free quotients
//! and integer linear solves. No floating point anywhere.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type IntVec = Vec<BigInt>;

/// A free abelian group of finite rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub rank: usize,
}

impl Lattice {
    pub fn new(rank: usize) -> Self {
        Lattice { rank }
    }
}

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<IntVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        IntMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Build a matrix whose columns are the given vectors. An explicit row
    /// count is required so that zero columns are representable.
    pub fn from_columns(rows: usize, cols: &[IntVec]) -> Self {
        for c in cols {
            assert_eq!(c.len(), rows, "column length mismatch");
        }
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_i64(rows: Vec<Vec<i64>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> IntVec {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn column(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<IntVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                acc += &self[(i, k)] * &other[(k, j)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVec {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &v[k];
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(v: &[BigInt], m: &IntMatrix) -> IntVec {
        assert_eq!(v.len(), m.rows, "vector-matrix shape mismatch");
        (0..m.cols)
            .map(|j| {
                let mut acc = BigInt::zero();
                for k in 0..m.rows {
                    acc += &v[k] * &m[(k, j)];
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn neg(&self) -> IntMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    pub fn submatrix_rows(&self, range: std::ops::Range<usize>) -> IntMatrix {
        Self::from_fn(range.len(), self.cols, |i, j| {
            self[(range.start + i, j)].clone()
        })
    }

    pub fn submatrix_cols(&self, range: std::ops::Range<usize>) -> IntMatrix {
        Self::from_fn(self.rows, range.len(), |i, j| {
            self[(i, range.start + j)].clone()
        })
    }

    /// Block-diagonal concatenation.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        Self::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => other[(i - self.rows, j - self.cols)].clone(),
                _ => BigInt::zero(),
            },
        )
    }

    pub fn to_i64(&self) -> Result<Vec<Vec<i64>>> {
        use num::ToPrimitive;
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        self[(i, j)].to_i64().ok_or_else(|| {
                            Error::Structural(format!("matrix entry {} exceeds i64", self[(i, j)]))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let e = &mut self[(r, j)];
            *e = -std::mem::take(e);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let e = &mut self[(i, c)];
            *e = -std::mem::take(e);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * &self[(src, j)];
            self[(dst, j)] += add;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * &self[(i, src)];
            self[(i, dst)] += add;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// U * A * V = D with U, V unimodular and D diagonal with a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let k = m.min(n);
    for t in 0..k {
        'pivot: loop {
            // smallest nonzero entry of the working submatrix becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero()
                        && best
                            .map(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            if d[(t, t)].is_negative() {
                d.negate_row(t);
                u.negate_row(t);
                u_inv.negate_col(t);
            }

            let mut dirty = false;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = -(&d[(i, t)] / &d[(t, t)]);
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    u_inv.add_col_multiple(t, i, &(-&q));
                    if !d[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = -(&d[(t, j)] / &d[(t, t)]);
                    d.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }

            // enforce the divisibility chain: the pivot must divide the rest
            for i in t + 1..m {
                for j in t + 1..n {
                    if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                        let one = BigInt::one();
                        d.add_row_multiple(t, i, &one);
                        u.add_row_multiple(t, i, &one);
                        u_inv.add_col_multiple(i, t, &(-&one));
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }

    let invariant_factors: Vec<BigInt> = (0..k)
        .map(|i| d[(i, i)].clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithDecomposition {
        u,
        u_inv,
        d,
        v,
        invariant_factors,
    }
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// True iff the columns generate a saturated sublattice, i.e. all Smith
/// invariant factors are 1.
pub fn is_saturated(sub_basis: &IntMatrix, ambient: Lattice) -> Result<bool> {
    if sub_basis.rows() != ambient.rank {
        return Err(Error::DimensionMismatch {
            context: "is_saturated: sub_basis columns vs ambient lattice".into(),
            expected: ambient.rank,
            got: sub_basis.rows(),
        });
    }
    let snf = smith_normal_form(sub_basis);
    Ok(snf.invariant_factors.iter().all(|f| f.is_one()))
}

/// Free quotient of the ambient lattice by the span of `sub_basis` columns.
#[derive(Debug, Clone)]
pub struct QuotientLattice {
    pub ambient: Lattice,
    pub sub_basis: IntMatrix,
    pub quotient: Lattice,
    /// (rank ambient - cols) x (rank ambient); kills the sublattice.
    pub projection: IntMatrix,
    /// Right inverse of `projection` modulo the sublattice.
    pub section: IntMatrix,
    /// Invariant factors > 1, nonempty only when torsion was explicitly allowed.
    pub torsion: Vec<BigInt>,
}

pub fn quotient(ambient: Lattice, sub_basis: &IntMatrix) -> Result<QuotientLattice> {
    quotient_with_options(ambient, sub_basis, false)
}

pub fn quotient_with_options(
    ambient: Lattice,
    sub_basis: &IntMatrix,
    allow_torsion: bool,
) -> Result<QuotientLattice> {
    let n = ambient.rank;
    if sub_basis.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "quotient: sub_basis rows vs ambient rank".into(),
            expected: n,
            got: sub_basis.rows(),
        });
    }
    let k = sub_basis.cols();
    let snf = smith_normal_form(sub_basis);
    if snf.rank() < k {
        return Err(Error::DependentColumns);
    }
    let torsion: Vec<BigInt> = snf
        .invariant_factors
        .iter()
        .filter(|f| !f.is_one())
        .cloned()
        .collect();
    if !torsion.is_empty() && !allow_torsion {
        return Err(Error::TorsionQuotient {
            factors: format!("{:?}", torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()),
        });
    }
    let projection = snf.u.submatrix_rows(k..n);
    let section = snf.u_inv.submatrix_cols(k..n);
    debug_assert!(projection.mul(sub_basis).is_zero());
    debug_assert!(projection.mul(&section).is_identity());
    Ok(QuotientLattice {
        ambient,
        sub_basis: sub_basis.clone(),
        quotient: Lattice::new(n - k),
        projection,
        section,
        torsion,
    })
}

/// One integer solution of A x = b, if any. Absence is a value, not an error.
pub fn solve_integer_linear(a: &IntMatrix, b: &[BigInt]) -> Option<IntVec> {
    assert_eq!(a.rows(), b.len(), "solve: rhs length mismatch");
    let (m, n) = (a.rows(), a.cols());
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let k = m.min(n);
    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i < k && !snf.d[(i, i)].is_zero() {
            let (q, r) = ci.div_rem(&snf.d[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    let x = snf.v.mul_vec(&y);
    debug_assert_eq!(a.mul_vec(&x), b.to_vec());
    Some(x)
}

/// Solve A X = B column by column; None if any column has no integer solution.
pub fn solve_integer_matrix(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows());
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        cols.push(solve_integer_linear(a, &b.column(j))?);
    }
    Some(IntMatrix::from_columns(a.cols(), &cols))
}

/// Basis of the integer kernel of A, as columns. The kernel is saturated.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.submatrix_cols(r..a.cols())
}

/// Canonical basis (as columns) of the saturation of the column span of A
/// inside the ambient lattice: span_Q(A) ∩ Z^n. Canonicalised via Hermite
/// normal form so it does not depend on the SNF pivot choices.
pub fn saturated_span_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let basis = snf.u_inv.submatrix_cols(0..r);
    let h = hnf_rows(&basis.transpose());
    h.submatrix_rows(0..r).transpose()
}

/// Row-style Hermite normal form: echelon with positive pivots and entries
/// above each pivot reduced into [0, pivot). Zero rows sink to the bottom.
pub fn hnf_rows(a: &IntMatrix) -> IntMatrix {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        // gcd out the column below r
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if !h[(i, col)].is_zero()
                    && best
                        .map(|b| h[(i, col)].abs() < h[(b, col)].abs())
                        .unwrap_or(true)
                {
                    best = Some(i);
                }
            }
            let Some(p) = best else {
                break;
            };
            h.swap_rows(r, p);
            if h[(r, col)].is_negative() {
                h.negate_row(r);
            }
            let mut done = true;
            for i in r + 1..m {
                if !h[(i, col)].is_zero() {
                    let q = -(h[(i, col)].div_floor(&h[(r, col)]));
                    h.add_row_multiple(i, r, &q);
                    if !h[(i, col)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        for i in 0..r {
            let q = -(h[(i, col)].div_floor(&h[(r, col)]));
            if !q.is_zero() {
                h.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
    h
}

/// |det| = 1 test for square matrices.
pub fn is_unimodular(a: &IntMatrix) -> bool {
    if a.rows() != a.cols() {
        return false;
    }
    let snf = smith_normal_form(a);
    snf.rank() == a.rows() && snf.invariant_factors.iter().all(|f| f.is_one())
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(a: &IntMatrix) -> Option<IntMatrix> {
    if a.rows() != a.cols() {
        return None;
    }
    let snf = smith_normal_form(a);
    if snf.rank() != a.rows() || !snf.invariant_factors.iter().all(|f| f.is_one()) {
        return None;
    }
    // A = U^-1 V^-1 when D = I, so A^-1 = V U.
    Some(snf.v.mul(&snf.u))
}

pub fn gcd_vec(v: &[BigInt]) -> BigInt {
    v.iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Divide by the gcd of the entries. The zero vector stays zero.
pub fn primitive(v: &[BigInt]) -> IntVec {
    let g = gcd_vec(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    gcd_vec(v).is_one()
}

pub fn vec_is_zero(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vec_sub(a: &[BigInt], b: &[BigInt]) -> IntVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[BigInt], b: &[BigInt]) -> IntVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_neg(a: &[BigInt]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn vec_i64(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

// ---------------------------------------------------------------------------
// Exact rational elimination, for slice geometry and membership of Q-points.
// ---------------------------------------------------------------------------

pub type RatVec = Vec<BigRational>;

pub fn rat_from_int(v: &[BigInt]) -> RatVec {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

/// Solve A x = b over the rationals (A integral). None when inconsistent.
/// When the system is underdetermined, free variables are set to zero.
pub fn rational_solve(a: &IntMatrix, b: &[BigRational]) -> Option<RatVec> {
    assert_eq!(a.rows(), b.len());
    let (m, n) = (a.rows(), a.cols());
    let mut mat: Vec<RatVec> = (0..m)
        .map(|i| {
            let mut row: RatVec = (0..n)
                .map(|j| BigRational::from_integer(a[(i, j)].clone()))
                .collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][col].recip();
        for x in mat[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != r && !mat[i][col].is_zero() {
                let f = mat[i][col].clone();
                for j in 0..=n {
                    let sub = &f * &mat[r][j];
                    mat[i][j] -= sub;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    for row in mat.iter().skip(r) {
        if !row[n].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for &(pr, pc) in &pivots {
        x[pc] = mat[pr][n].clone();
    }
    Some(x)
}

pub fn rat_dot(a: &[BigInt], b: &[BigRational]) -> BigRational {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
        .sum()
}

/// Scale a rational direction vector to its primitive integral representative,
/// preserving orientation.
pub fn primitive_direction(v: &[BigRational]) -> IntVec {
    use num::bigint::Sign;
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let ints: IntVec = v
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let p = primitive(&ints);
    debug_assert!(
        denom_lcm.sign() != Sign::Minus,
        "lcm of denominators is positive"
    );
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn check_snf(a: &IntMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.d, "U*A*V = D");
        assert!(is_unimodular(&snf.u), "U unimodular");
        assert!(is_unimodular(&snf.v), "V unimodular");
        assert!(snf.u.mul(&snf.u_inv).is_identity(), "U*U^-1 = I");
        for w in snf.invariant_factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
        }
        for f in &snf.invariant_factors {
            assert!(f.is_positive());
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntMatrix::identity(2));
        assert_eq!(snf.invariant_factors, vec_i64(&[1, 1]));
        assert!(snf.d.is_identity());
    }

    #[test]
    fn snf_diag_2_3() {
        let snf = check_snf(&m(vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(snf.invariant_factors, vec_i64(&[1, 6]));
    }

    #[test]
    fn snf_zero() {
        let snf = check_snf(&IntMatrix::zeros(3, 2));
        assert!(snf.invariant_factors.is_empty());
    }

    #[test]
    fn saturation_examples() {
        let z2 = Lattice::new(2);
        let b1 = IntMatrix::from_columns(2, &[vec_i64(&[1, 0])]);
        assert!(is_saturated(&b1, z2).unwrap());
        let b2 = IntMatrix::from_columns(2, &[vec_i64(&[2, 0])]);
        assert!(!is_saturated(&b2, z2).unwrap());
        let b3 = IntMatrix::from_columns(2, &[vec_i64(&[1, 1])]);
        assert!(is_saturated(&b3, z2).unwrap());
        let bad = IntMatrix::from_columns(3, &[vec_i64(&[1, 0, 0])]);
        assert!(is_saturated(&bad, z2).is_err());
    }

    #[test]
    fn quotient_by_diagonal() {
        let q = quotient(Lattice::new(2), &IntMatrix::from_columns(2, &[vec_i64(&[1, 1])])).unwrap();
        assert_eq!(q.quotient.rank, 1);
        assert!(q.projection.mul(&q.sub_basis).is_zero());
        // projection is (a, b) -> a - b up to sign
        let p = q.projection.row(0);
        assert_eq!(&p[0] + &p[1], BigInt::zero());
        assert!(p[0].abs().is_one());
        assert!(q.projection.mul(&q.section).is_identity());
    }

    #[test]
    fn quotient_by_nothing() {
        let q = quotient(Lattice::new(3), &IntMatrix::zeros(3, 0)).unwrap();
        assert_eq!(q.quotient.rank, 3);
        assert!(is_unimodular(&q.projection));
    }

    #[test]
    fn quotient_torsion_rejected() {
        let err = quotient(Lattice::new(2), &IntMatrix::from_columns(2, &[vec_i64(&[2, 0])]))
            .unwrap_err();
        match err {
            Error::TorsionQuotient { factors } => assert!(factors.contains('2')),
            other => panic!("expected torsion error, got {other}"),
        }
        let q = quotient_with_options(
            Lattice::new(2),
            &IntMatrix::from_columns(2, &[vec_i64(&[2, 0])]),
            true,
        )
        .unwrap();
        assert_eq!(q.torsion, vec_i64(&[2]));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_integer_linear(&m(vec![vec![2]]), &vec_i64(&[4])),
            Some(vec_i64(&[2]))
        );
        assert_eq!(solve_integer_linear(&m(vec![vec![2]]), &vec_i64(&[3])), None);
        let a = m(vec![vec![1, 1]]);
        let x = solve_integer_linear(&a, &vec_i64(&[5])).unwrap();
        assert_eq!(a.mul_vec(&x), vec_i64(&[5]));
    }

    #[test]
    fn kernel_and_span() {
        let a = m(vec![vec![1, -1], vec![1, -1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        assert!(is_primitive(&k.column(0)));

        let b = IntMatrix::from_columns(2, &[vec_i64(&[2, 0]), vec_i64(&[0, 3])]);
        let s = saturated_span_basis(&b);
        assert_eq!(s.cols(), 2);
        assert!(is_unimodular(&s));
    }

    #[test]
    fn span_basis_canonical() {
        // same lattice from different generator orderings gives the same basis
        let b1 = IntMatrix::from_columns(3, &[vec_i64(&[0, 1, 1]), vec_i64(&[1, 0, 0])]);
        let b2 = IntMatrix::from_columns(3, &[vec_i64(&[1, 1, 1]), vec_i64(&[1, 0, 0])]);
        assert_eq!(saturated_span_basis(&b1), saturated_span_basis(&b2));
    }

    #[test]
    fn rational_solver() {
        let a = m(vec![vec![2, 0], vec![0, 4]]);
        let b = vec![
            BigRational::new(BigInt::from(1), BigInt::from(1)),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        ];
        let x = rational_solve(&a, &b).unwrap();
        assert_eq!(x[0], BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(x[1], BigRational::new(BigInt::from(1), BigInt::from(8)));
        let inconsistent = rational_solve(&m(vec![vec![1], vec![1]]), &[
            BigRational::from_integer(BigInt::from(0)),
            BigRational::from_integer(BigInt::from(1)),
        ]);
        assert!(inconsistent.is_none());
    }
}
