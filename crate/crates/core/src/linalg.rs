//! Dense complex matrix helpers shared by every module.
//!
//! Matrices are [`faer::Mat<c64>`]. Vectorization is row-major throughout:
//! `vec(M)[i * d + j] = M[i, j]`.

use std::cmp::Ordering;

use faer::{Mat, MatRef, Side};
pub use faer::c64;

use crate::error::{Error, Result};

/// Owned dense complex matrix.
pub type CMat = Mat<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn identity(d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| if i == j { ONE } else { ZERO })
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

/// Builds a complex matrix from real row-major data.
pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| c64::new(rows[i][j], 0.0))
}

pub fn diag_real(values: &[f64]) -> CMat {
    let d = values.len();
    Mat::from_fn(d, d, |i, j| if i == j { c64::new(values[i], 0.0) } else { ZERO })
}

/// Returns `d` if `n == d * d`.
pub fn square_root_dim(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

/// Checks a matrix is `d^2 x d^2` and returns `d`.
pub fn choi_dim(m: MatRef<'_, c64>) -> Result<usize> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows != cols {
        return Err(Error::NotPerfectSquare { rows, cols });
    }
    square_root_dim(rows).ok_or(Error::NotPerfectSquare { rows, cols })
}

pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    a.kron(b)
}

pub fn conj(m: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

pub fn adjoint(m: MatRef<'_, c64>) -> CMat {
    m.adjoint().to_owned()
}

/// Row-major vectorization.
pub fn vec_row_major(m: MatRef<'_, c64>) -> Vec<c64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec_row_major`] for a `d x d` matrix.
pub fn devec_row_major(v: &[c64], d: usize) -> CMat {
    assert_eq!(v.len(), d * d, "vector length must be d^2");
    Mat::from_fn(d, d, |i, j| v[i * d + j])
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `(M + M^dag) / 2`.
pub fn hermitian_part(m: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Largest entrywise modulus of `M - M^dag`.
pub fn hermiticity_defect(m: MatRef<'_, c64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMat,
}

/// Hermitian eigendecomposition, descending.
///
/// Exactly tied eigenvalues are ordered lexicographically by their
/// eigenvector entries so that truncation is reproducible.
pub fn eigh(m: MatRef<'_, c64>) -> Result<HermitianEigen> {
    let n = m.nrows();
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        s[b].re.total_cmp(&s[a].re).then_with(|| {
            for r in 0..n {
                let ord = u[(r, a)]
                    .re
                    .total_cmp(&u[(r, b)].re)
                    .then(u[(r, a)].im.total_cmp(&u[(r, b)].im));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    });
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigvalsh(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let mut values = m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)?;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Number of values strictly above `rel_tol * max(values)`.
pub fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > rel_tol * top).count()
}

/// `M^{-1/2}` for a Hermitian positive definite matrix.
pub fn inverse_sqrt_pd(m: MatRef<'_, c64>) -> Result<CMat> {
    let HermitianEigen { values, vectors } = eigh(m)?;
    if let Some(&min) = values.last() {
        if min <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not positive definite (eigenvalue {min:e})"
            )));
        }
    }
    let n = values.len();
    let scaled = Mat::from_fn(n, n, |r, c| vectors[(r, c)] * values[c].sqrt().recip());
    Ok(&scaled * vectors.adjoint())
}

/// Rank of a real matrix given as rows, relative to its largest singular value.
pub fn real_rank(rows: &[Vec<f64>], ncols: usize, rel_tol: f64) -> Result<usize> {
    if rows.is_empty() || ncols == 0 {
        return Ok(0);
    }
    let a = Mat::<f64>::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let s = a.singular_values().map_err(|_| Error::Eigen)?;
    Ok(numerical_rank(&s, rel_tol))
}

/// Extracts the `d x d` block `(row, col)` of a `d^2 x d^2` matrix.
pub fn block(m: MatRef<'_, c64>, d: usize, row: usize, col: usize) -> CMat {
    m.submatrix(row * d, col * d, d, d).to_owned()
}

/// Overwrites block `(row, col)` of a `d^2 x d^2` matrix.
pub fn set_block(m: &mut CMat, d: usize, row: usize, col: usize, src: MatRef<'_, c64>) {
    for a in 0..d {
        for b in 0..d {
            m[(row * d + a, col * d + b)] = src[(a, b)];
        }
    }
}
