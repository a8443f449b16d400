//! Exact rational scalars, vectors and matrices.
//!
//! Everything downstream (vertex enumeration, canonical scalings, form
//! recovery) runs on `Rat` = arbitrary-precision rationals, so every equality
//! tested in this crate is exact. There is no floating point in any checking
//! path; see [`approximate_sqrt_factor`] for the one explicitly lossy export.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision integer, the entry type of lattice vectors.
pub type Int = BigInt;
/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator by `num-rational`.
pub type Rat = BigRational;
/// Dense rational vector.
pub type RatVector = Vec<Rat>;
/// Dense integer (lattice) vector.
pub type IntVector = Vec<Int>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("system has no solution")]
    NoSolution,
    #[error("matrix has a singular leading principal submatrix")]
    NotDecomposable,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Shorthand for a small integer as a `Rat`.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Shorthand for `p/q`; panics when `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn int_vec(entries: &[i64]) -> IntVector {
    entries.iter().copied().map(Int::from).collect()
}

pub fn rat_vec(entries: &[i64]) -> RatVector {
    entries.iter().copied().map(rat).collect()
}

pub fn int_to_rat_vec(v: &[Int]) -> RatVector {
    v.iter().map(|e| Rat::from_integer(e.clone())).collect()
}

/// Exact dot product of two rational vectors.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dot product of a rational vector with an integer vector.
pub fn dot_int(a: &[Rat], b: &[Int]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot_int: length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| x * Rat::from_integer(y.clone()))
        .sum()
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Rat, a: &[Rat]) -> RatVector {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_neg(a: &[Rat]) -> RatVector {
    a.iter().map(|x| -x).collect()
}

pub fn vec_is_zero(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn int_vec_add(a: &[Int], b: &[Int]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn int_vec_sub(a: &[Int], b: &[Int]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn int_vec_neg(a: &[Int]) -> IntVector {
    a.iter().map(|x| -x).collect()
}

pub fn int_vec_is_zero(a: &[Int]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<RatVector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| rat_vec(r)).collect())
    }

    /// Builds the n×k matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RatVector]) -> Self {
        let k = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zero(n, k);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "ragged columns");
            for i in 0..n {
                m[(i, j)] = col[i].clone();
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> RatVector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<RatVector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut m = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].clone();
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if self[(r, c)] != self[(c, r)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut m = Self::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rat::zero();
                for k in 0..self.cols {
                    acc += &self[(r, k)] * &other[(k, c)];
                }
                m[(r, c)] = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> RatVector {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul_int_vec(&self, v: &[Int]) -> RatVector {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        (0..self.rows).map(|r| dot_int(self.row(r), v)).collect()
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// Column rank via fraction-preserving Gaussian elimination.
    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        // Gauss-Jordan on [self | I].
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = &a[(col, c)] / &p;
                inv[(col, c)] = &inv[(col, c)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for c in 0..n {
                    let x = &a[(col, c)] * &f;
                    a[(r, c)] = &a[(r, c)] - x;
                    let y = &inv[(col, c)] * &f;
                    inv[(r, c)] = &inv[(r, c)] - y;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(r1 * self.cols + c, r2 * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns.
pub(crate) fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row >= a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let pv = a[(row, col)].clone();
        for c in 0..a.cols {
            a[(row, c)] = &a[(row, c)] / &pv;
        }
        for r in 0..a.rows {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for c in 0..a.cols {
                let x = &a[(row, c)] * &f;
                a[(r, c)] = &a[(r, c)] - x;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Solves `M x = b` exactly. Underdetermined systems get free variables
/// pinned to zero; inconsistent systems return [`LinalgError::NoSolution`].
pub fn solve(m: &RatMatrix, b: &[Rat]) -> Result<RatVector, LinalgError> {
    if m.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} rows, rhs has {}",
            m.rows(),
            b.len()
        )));
    }
    // Row-reduce the augmented matrix [M | b].
    let mut aug_rows = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut row = m.row(r).to_vec();
        row.push(b[r].clone());
        aug_rows.push(row);
    }
    let (reduced, pivots) = rref(&RatMatrix::from_rows(aug_rows));
    if pivots.contains(&m.cols()) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = vec![Rat::zero(); m.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = reduced[(row, m.cols())].clone();
    }
    Ok(x)
}

/// Solves a square system with a unique solution; `None` when the matrix is
/// singular. Used by vertex enumeration, where non-unique intersections are
/// skipped rather than reported.
pub fn solve_unique(m: &RatMatrix, b: &[Rat]) -> Option<RatVector> {
    if !m.is_square() || m.rank() != m.rows() {
        return None;
    }
    solve(m, b).ok()
}

/// Exact basis of the kernel `{x : Mx = 0}`; empty when trivial.
pub fn nullspace(m: &RatMatrix) -> Vec<RatVector> {
    let (reduced, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rat::zero(); m.cols()];
        v[f] = Rat::one();
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = -reduced[(row, f)].clone();
        }
        basis.push(v);
    }
    basis
}

/// A quadratic form `f(x) = x^T D x` given by its symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: RatMatrix,
}

impl QuadraticForm {
    pub fn new(matrix: RatMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_symmetric() {
            return Err(LinalgError::NotSymmetric);
        }
        Ok(QuadraticForm { matrix })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::new(RatMatrix::from_i64_rows(rows)).expect("symmetric literal")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// Evaluates `x^T D x`.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(x, &self.matrix.mul_vec(x))
    }

    /// Evaluates the form on an integer vector.
    pub fn eval_int(&self, x: &[Int]) -> Rat {
        let xr = int_to_rat_vec(x);
        self.eval(&xr)
    }

    /// `x^T D y` for integer vectors, the lattice inner product.
    pub fn pairing_int(&self, x: &[Int], y: &[Int]) -> Rat {
        dot(&int_to_rat_vec(x), &self.matrix.mul_int_vec(y))
    }
}

/// Square-root-free factorization `D = L · diag(d) · L^T` with `L` unit
/// lower-triangular. Fails with [`LinalgError::NotDecomposable`] as soon as a
/// pivot is zero, which signals a singular leading principal submatrix.
pub fn ldlt(form: &QuadraticForm) -> Result<(RatMatrix, RatVector), LinalgError> {
    let n = form.dim();
    let a = form.matrix();
    let mut l = RatMatrix::identity(n);
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut pivot = a[(j, j)].clone();
        for k in 0..j {
            pivot -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if pivot.is_zero() {
            return Err(LinalgError::NotDecomposable);
        }
        d[j] = pivot;
        for i in (j + 1)..n {
            let mut acc = a[(i, j)].clone();
            for k in 0..j {
                acc -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = acc / &d[j];
        }
    }
    Ok((l, d))
}

/// True iff the form is positive definite: the `LDL^T` pivots all exist and
/// are positive (equivalently, all leading principal minors are positive).
pub fn is_positive_definite(form: &QuadraticForm) -> bool {
    match ldlt(form) {
        Ok((_, d)) => d.iter().all(|p| p.is_positive()),
        Err(_) => false,
    }
}

/// Floating-point factor `A = diag(sqrt(d)) · L^T` with `A^T A = D`.
///
/// This is the only lossy export in the crate: `A` is irrational in general,
/// so callers get an explicitly approximate matrix. Returns `None` when the
/// form is not positive definite.
pub fn approximate_sqrt_factor(form: &QuadraticForm) -> Option<Vec<Vec<f64>>> {
    let (l, d) = ldlt(form).ok()?;
    if !d.iter().all(|p| p.is_positive()) {
        return None;
    }
    let n = form.dim();
    let to_f64 = |r: &Rat| -> f64 {
        let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
        let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        num / den
    };
    let lt = l.transpose();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        let s = to_f64(&d[i]).sqrt();
        for j in 0..n {
            a[i][j] = s * to_f64(&lt[(i, j)]);
        }
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity() {
        let m = RatMatrix::identity(2);
        let b = vec![rat(3), ratio(-1, 2)];
        assert_eq!(solve(&m, &b).unwrap(), b);
    }

    #[test]
    fn solve_back_substitution() {
        let m = RatMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let x = solve(&m, &rat_vec(&[2, 1])).unwrap();
        assert_eq!(x, rat_vec(&[1, 1]));
    }

    #[test]
    fn solve_inconsistent_rows() {
        let m = RatMatrix::from_i64_rows(&[&[1, 0], &[1, 0]]);
        assert_eq!(solve(&m, &rat_vec(&[0, 1])), Err(LinalgError::NoSolution));
    }

    #[test]
    fn nullspace_trivial_kernel() {
        assert!(nullspace(&RatMatrix::identity(3)).is_empty());
    }

    #[test]
    fn nullspace_rank_one_in_three_vars() {
        let m = RatMatrix::from_i64_rows(&[&[1, -1, 0]]);
        let basis = nullspace(&m);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(vec_is_zero(&m.mul_vec(v)));
        }
        // Basis vectors are linearly independent.
        assert_eq!(RatMatrix::from_rows(basis).rank(), 2);
    }

    #[test]
    fn nullspace_zero_map() {
        let m = RatMatrix::zero(1, 2);
        assert_eq!(nullspace(&m).len(), 2);
    }

    #[test]
    fn ldlt_identity() {
        let d = QuadraticForm::from_i64_rows(&[&[1, 0], &[0, 1]]);
        let (l, diag) = ldlt(&d).unwrap();
        assert_eq!(l, RatMatrix::identity(2));
        assert_eq!(diag, rat_vec(&[1, 1]));
    }

    #[test]
    fn ldlt_two_by_two() {
        let d = QuadraticForm::from_i64_rows(&[&[2, 1], &[1, 2]]);
        let (l, diag) = ldlt(&d).unwrap();
        assert_eq!(l[(1, 0)], ratio(1, 2));
        assert_eq!(diag, vec![rat(2), ratio(3, 2)]);
        assert_eq!(reconstruct(&l, &diag), *d.matrix());
    }

    #[test]
    fn ldlt_zero_pivot() {
        let d = QuadraticForm::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(ldlt(&d), Err(LinalgError::NotDecomposable));
    }

    #[test]
    fn pd_examples() {
        assert!(is_positive_definite(&QuadraticForm::new(RatMatrix::identity(3)).unwrap()));
        let indefinite = QuadraticForm::from_i64_rows(&[&[1, 2], &[2, 1]]);
        assert_eq!(cofactor_det(indefinite.matrix()), rat(-3));
        assert!(!is_positive_definite(&indefinite));
        let pd = QuadraticForm::from_i64_rows(&[&[1, -1], &[-1, 2]]);
        assert_eq!(leading_minor(pd.matrix(), 1), rat(1));
        assert_eq!(leading_minor(pd.matrix(), 2), rat(1));
        assert!(is_positive_definite(&pd));
    }

    #[test]
    fn approximate_factor_squares_back() {
        let d = QuadraticForm::from_i64_rows(&[&[2, 1], &[1, 2]]);
        let a = approximate_sqrt_factor(&d).unwrap();
        let mut ata = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    ata[i][j] += a[k][i] * a[k][j];
                }
            }
        }
        assert!((ata[0][0] - 2.0).abs() < 1e-12);
        assert!((ata[0][1] - 1.0).abs() < 1e-12);
        assert!((ata[1][1] - 2.0).abs() < 1e-12);
        assert!(approximate_sqrt_factor(&QuadraticForm::from_i64_rows(&[&[1, 2], &[2, 1]])).is_none());
    }

    /// Oracle: determinant by cofactor expansion along the first row.
    pub(crate) fn cofactor_det(m: &RatMatrix) -> Rat {
        assert!(m.is_square());
        let n = m.rows();
        if n == 0 {
            return rat(1);
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rat::zero();
        for c in 0..n {
            if m[(0, c)].is_zero() {
                continue;
            }
            let mut sub = RatMatrix::zero(n - 1, n - 1);
            for r in 1..n {
                let mut cc = 0;
                for k in 0..n {
                    if k == c {
                        continue;
                    }
                    sub[(r - 1, cc)] = m[(r, k)].clone();
                    cc += 1;
                }
            }
            let term = &m[(0, c)] * cofactor_det(&sub);
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    pub(crate) fn leading_minor(m: &RatMatrix, k: usize) -> Rat {
        let mut sub = RatMatrix::zero(k, k);
        for r in 0..k {
            for c in 0..k {
                sub[(r, c)] = m[(r, c)].clone();
            }
        }
        cofactor_det(&sub)
    }

    pub(crate) fn reconstruct(l: &RatMatrix, d: &[Rat]) -> RatMatrix {
        let n = d.len();
        let mut diag = RatMatrix::zero(n, n);
        for i in 0..n {
            diag[(i, i)] = d[i].clone();
        }
        l.mul(&diag).mul(&l.transpose())
    }
}
