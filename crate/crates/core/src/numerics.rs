//! Dense complex linear algebra used by every other module.
//!
//! [`MatrixC`] wraps an `nalgebra` dense matrix. Rank decisions, nullspaces
//! and commutants all go through a singular value decomposition with a
//! threshold relative to the largest singular value, see [`Tolerance`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    EigenConvergence(usize),
    #[error("eigenvalue trace check failed: |sum - trace| = {0:e}")]
    EigenTrace(f64),
    #[error("matrix is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Numerical thresholds threaded through every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute bound on Frobenius residuals that count as zero.
    pub residual_abs: f64,
    /// Singular values below `rank_rel * sigma_max` are treated as zero.
    pub rank_rel: f64,
    /// Relative distance under which two eigenvalues are clustered.
    pub cluster_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            residual_abs: 1e-10,
            rank_rel: 1e-8,
            cluster_rel: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.residual_abs) {
            return Err(NumericsError::InvalidTolerance("residual_abs must be > 0"));
        }
        if !ok(self.rank_rel) {
            return Err(NumericsError::InvalidTolerance("rank_rel must be > 0"));
        }
        if !ok(self.cluster_rel) {
            return Err(NumericsError::InvalidTolerance("cluster_rel must be > 0"));
        }
        Ok(())
    }
}

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct MatrixC(DMatrix<C64>);

impl fmt::Debug for MatrixC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixC {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl MatrixC {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Matrix unit with a single 1 at zero-based `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.0[(i, j)] = ONE;
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let d: Vec<C64> = d.iter().map(|&x| c(x)).collect();
        Self::from_diag(&d)
    }

    /// Build from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        Self(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    /// `sum_k conj(a_k) b_k` over all entries.
    pub fn frobenius_inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Row-major vectorization.
    pub fn vec_row_major(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                v.push(self.0[(i, j)]);
            }
        }
        v
    }

    pub fn from_vec_row_major(rows: usize, cols: usize, v: &[C64]) -> Self {
        Self::from_rows(rows, cols, v)
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows()).all(|i| (0..i.min(self.cols())).all(|j| self.0[(i, j)] == ZERO))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows()).all(|i| (i + 1..self.cols()).all(|j| self.0[(i, j)] == ZERO))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }

    pub fn ensure_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(NumericsError::ShapeMismatch {
                expected: shape,
                found: self.shape(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for MatrixC {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixC {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&MatrixC> for &MatrixC {
            type Output = MatrixC;
            fn $f(self, rhs: &MatrixC) -> MatrixC {
                MatrixC(&self.0 $op &rhs.0)
            }
        }
        impl $tr<MatrixC> for MatrixC {
            type Output = MatrixC;
            fn $f(self, rhs: MatrixC) -> MatrixC {
                MatrixC(self.0 $op rhs.0)
            }
        }
        impl $tr<&MatrixC> for MatrixC {
            type Output = MatrixC;
            fn $f(self, rhs: &MatrixC) -> MatrixC {
                MatrixC(self.0 $op &rhs.0)
            }
        }
        impl $tr<MatrixC> for &MatrixC {
            type Output = MatrixC;
            fn $f(self, rhs: MatrixC) -> MatrixC {
                MatrixC(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &MatrixC {
    type Output = MatrixC;
    fn mul(self, s: C64) -> MatrixC {
        self.scale(s)
    }
}

impl Mul<C64> for MatrixC {
    type Output = MatrixC;
    fn mul(self, s: C64) -> MatrixC {
        self.scale(s)
    }
}

impl Neg for MatrixC {
    type Output = MatrixC;
    fn neg(self) -> MatrixC {
        MatrixC(-self.0)
    }
}

impl AddAssign<&MatrixC> for MatrixC {
    fn add_assign(&mut self, rhs: &MatrixC) {
        self.0 += &rhs.0;
    }
}

/// Kronecker product, `(a⊗b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l]`.
pub fn kron(a: &MatrixC, b: &MatrixC) -> MatrixC {
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(a.rows() * rb, a.cols() * cb);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.0[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b.0[(k, l)];
                }
            }
        }
    }
    MatrixC(out)
}

/// Kronecker product of a non-empty list, left to right.
pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a MatrixC>) -> Option<MatrixC> {
    let mut it = mats.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| kron(&acc, m)))
}

/// Singular values in descending order. Only the values are used: the
/// complex SVD's singular vectors can lose accuracy on rank-deficient input.
fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    let mut sigma: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sigma
}

fn numerical_rank(sigma: &[f64], rank_rel: f64) -> usize {
    match sigma.first() {
        Some(&smax) if smax > 0.0 => sigma.iter().filter(|&&s| s > rank_rel * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the nullspace of `a` (as column vectors).
pub fn nullspace(a: &DMatrix<C64>, tol: &Tolerance) -> Vec<DVector<C64>> {
    let n = a.ncols();
    if a.nrows() == 0 || a.iter().all(|z| *z == ZERO) {
        return (0..n)
            .map(|i| {
                let mut v = DVector::zeros(n);
                v[i] = ONE;
                v
            })
            .collect();
    }
    let r = numerical_rank(&singular_values(a), tol.rank_rel);
    let rows = pivoted_orthonormal(&a.adjoint().column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), r);
    let units: Vec<DVector<C64>> = (0..n)
        .map(|i| {
            let mut v = DVector::zeros(n);
            v[i] = ONE;
            v
        })
        .collect();
    complete_orthonormal(&rows, &units, n - r)
}

/// Projects out `basis` twice; one pass loses orthogonality on
/// nearly dependent inputs.
fn reorthogonalize(v: &mut DVector<C64>, basis: &[DVector<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, ONE);
        }
    }
}

/// Gram-Schmidt with column pivoting: repeatedly takes the candidate with
/// the largest residual. Returns `count` orthonormal vectors spanning the
/// dominant part of the candidates' span.
fn pivoted_orthonormal(candidates: &[DVector<C64>], count: usize) -> Vec<DVector<C64>> {
    complete_orthonormal(&[], candidates, count)
}

/// Extends the orthonormal `start` by `count` pivoted vectors drawn from
/// `candidates`; the returned list excludes `start`.
fn complete_orthonormal(start: &[DVector<C64>], candidates: &[DVector<C64>], count: usize) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = start.to_vec();
    let mut resid: Vec<DVector<C64>> = candidates.to_vec();
    for r in resid.iter_mut() {
        reorthogonalize(r, &basis);
    }
    let mut out = Vec::with_capacity(count);
    let mut used = vec![false; resid.len()];
    while out.len() < count {
        // Ties resolve to the lowest index so the result is deterministic.
        let pick = (0..resid.len())
            .filter(|&j| !used[j])
            .fold(None, |best: Option<(usize, f64)>, j| {
                let nj = resid[j].norm();
                match best {
                    Some((_, nb)) if nb >= nj => best,
                    _ => Some((j, nj)),
                }
            });
        let Some((j, nj)) = pick else { break };
        if nj == 0.0 {
            break;
        }
        used[j] = true;
        let mut v = resid[j].clone();
        reorthogonalize(&mut v, &basis);
        let nv = v.norm();
        if nv == 0.0 {
            continue;
        }
        v.unscale_mut(nv);
        for (k, r) in resid.iter_mut().enumerate() {
            if !used[k] {
                let c = v.dotc(r);
                r.axpy(-c, &v, ONE);
            }
        }
        basis.push(v.clone());
        out.push(v);
    }
    out
}

fn stack_vectorized(mats: &[MatrixC]) -> Result<DMatrix<C64>> {
    let shape = mats[0].shape();
    for m in mats {
        m.ensure_shape(shape)?;
    }
    let len = shape.0 * shape.1;
    let mut a = DMatrix::zeros(len, mats.len());
    for (j, m) in mats.iter().enumerate() {
        for (i, z) in m.vec_row_major().into_iter().enumerate() {
            a[(i, j)] = z;
        }
    }
    Ok(a)
}

/// Dimension of the linear span of `mats`.
pub fn span_dim(mats: &[MatrixC], tol: &Tolerance) -> Result<usize> {
    if mats.is_empty() {
        return Ok(0);
    }
    let a = stack_vectorized(mats)?;
    Ok(numerical_rank(&singular_values(&a), tol.rank_rel))
}

/// Frobenius-orthonormal basis of the linear span of `mats`.
pub fn span_basis(mats: &[MatrixC], tol: &Tolerance) -> Result<Vec<MatrixC>> {
    if mats.is_empty() {
        return Ok(Vec::new());
    }
    let (r, c) = mats[0].shape();
    let a = stack_vectorized(mats)?;
    let rank = numerical_rank(&singular_values(&a), tol.rank_rel);
    let cols: Vec<DVector<C64>> = a.column_iter().map(|v| v.into_owned()).collect();
    Ok(pivoted_orthonormal(&cols, rank)
        .into_iter()
        .map(|u| MatrixC::from_vec_row_major(r, c, u.as_slice()))
        .collect())
}

/// True iff `m` lies in the span of the orthonormal `basis` within the rank
/// tolerance (relative to `‖m‖`).
pub fn in_span(m: &MatrixC, orthonormal_basis: &[MatrixC], tol: &Tolerance) -> bool {
    let norm = m.norm();
    if norm == 0.0 {
        return true;
    }
    let mut resid = m.clone();
    for b in orthonormal_basis {
        let coeff = b.frobenius_inner(m);
        resid = resid - b.scale(coeff);
    }
    resid.norm() <= tol.rank_rel * norm.max(1.0)
}

/// Matrix of the linear map `X ↦ XG - s·GX` on row-major vectorized `X`.
pub fn twisted_commutator_operator(g: &MatrixC, s: C64) -> DMatrix<C64> {
    let n = g.rows();
    let mut k = DMatrix::zeros(n * n, n * n);
    // e_ab G puts row b of G into row a, G e_ab puts column a of G into
    // column b.
    for a in 0..n {
        for b in 0..n {
            let col = a * n + b;
            for j in 0..n {
                k[(a * n + j, col)] += g[(b, j)];
            }
            for i in 0..n {
                k[(i * n + b, col)] -= s * g[(i, a)];
            }
        }
    }
    k
}

/// Product `a·b` that skips zero entries of `b`. Agrees exactly with `a * b`
/// and is much cheaper on Kronecker-built operators.
pub fn mul_sparse(a: &MatrixC, b: &MatrixC) -> MatrixC {
    assert_eq!(a.cols(), b.rows(), "mul_sparse shape mismatch");
    let mut out = DMatrix::zeros(a.rows(), b.cols());
    for j in 0..b.cols() {
        for k in 0..b.rows() {
            let bkj = b.0[(k, j)];
            if bkj == ZERO {
                continue;
            }
            for i in 0..a.rows() {
                let aik = a.0[(i, k)];
                if aik != ZERO {
                    out[(i, j)] += aik * bkj;
                }
            }
        }
    }
    MatrixC(out)
}

/// Frobenius-orthonormal basis of `{X : [X, M] = 0 for all M in mats}` for
/// `dim`×`dim` matrices.
pub fn commutant(mats: &[MatrixC], dim: usize, tol: &Tolerance) -> Result<Vec<MatrixC>> {
    for m in mats {
        m.ensure_shape((dim, dim))?;
    }
    let mut stacked = DMatrix::zeros(mats.len() * dim * dim, dim * dim);
    for (idx, m) in mats.iter().enumerate() {
        stacked
            .view_mut((idx * dim * dim, 0), (dim * dim, dim * dim))
            .copy_from(&twisted_commutator_operator(m, ONE));
    }
    Ok(nullspace(&stacked, tol)
        .into_iter()
        .map(|v| MatrixC::from_vec_row_major(dim, dim, v.as_slice()))
        .collect())
}

/// Eigenvalues of a general complex square matrix.
///
/// Triangular inputs return their diagonal exactly; everything else goes
/// through a complex Schur decomposition.
pub fn eigenvalues(m: &MatrixC, tol: &Tolerance) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let vals = if m.is_upper_triangular() || m.is_lower_triangular() {
        m.diagonal()
    } else {
        let schur = nalgebra::Schur::try_new(m.0.clone(), f64::EPSILON, 100 * n.max(10))
            .ok_or(NumericsError::EigenConvergence(n))?;
        let (_, t) = schur.unpack();
        (0..n).map(|i| t[(i, i)]).collect()
    };
    if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::EigenConvergence(n));
    }
    let diff = (vals.iter().sum::<C64>() - m.trace()).norm();
    let scale = m.norm().max(1.0);
    if diff > tol.residual_abs * n as f64 * scale {
        return Err(NumericsError::EigenTrace(diff));
    }
    Ok(vals)
}

/// Inverse by LU with partial pivoting, together with the 2-norm condition
/// number estimate `sigma_max / sigma_min`.
pub fn inverse_with_condition(m: &MatrixC) -> Result<(MatrixC, f64)> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare(m.rows(), m.cols()));
    }
    let sigma = singular_values(&m.0);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = sigma.last().copied().unwrap_or(0.0);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > 1e14 {
        return Err(NumericsError::Singular { condition });
    }
    let inv = m
        .0
        .clone()
        .lu()
        .try_inverse()
        .ok_or(NumericsError::Singular { condition })?;
    Ok((MatrixC(inv), condition))
}
