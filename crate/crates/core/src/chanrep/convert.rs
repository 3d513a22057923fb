use std::fmt;

use faer::{Mat, MatRef};

use super::{ChoiMatrix, KrausSet, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};

/// `S = sum_r K_r (x) conj(K_r)`.
pub fn kraus_to_superop(k: &KrausSet) -> Superoperator {
    let d = k.dim();
    let mut s = linalg::zeros(d * d, d * d);
    for op in k.ops() {
        s += linalg::kron(op.as_ref(), linalg::conj(op.as_ref()).as_ref());
    }
    Superoperator { dim: d, mat: s }
}

/// Index reshuffle `M^R[(i,j),(k,l)] = M[(i,k),(j,l)]`.
///
/// Maps the natural representation to the Choi matrix and back; it is an
/// involution.
pub fn reshuffle(m: MatRef<'_, c64>) -> Result<CMat> {
    let d = linalg::choi_dim(m)?;
    Ok(Mat::from_fn(d * d, d * d, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        m[(i * d + k, j * d + l)]
    }))
}

/// `J = sum_r vec(K_r) vec(K_r)^dag`.
pub fn kraus_to_choi(k: &KrausSet) -> ChoiMatrix {
    let d = k.dim();
    let n = d * d;
    let vecs = Mat::from_fn(n, k.len(), |row, r| k.ops()[r][(row / d, row % d)]);
    ChoiMatrix { dim: d, mat: &vecs * vecs.adjoint() }
}

pub fn superop_to_choi(s: &Superoperator) -> ChoiMatrix {
    // Shape already checked on construction.
    let mat = reshuffle(s.as_mat()).expect("superoperator is d^2 x d^2");
    ChoiMatrix { dim: s.dim(), mat }
}

pub fn choi_to_superop(j: &ChoiMatrix) -> Superoperator {
    let mat = reshuffle(j.as_mat()).expect("Choi matrix is d^2 x d^2");
    Superoperator { dim: j.dim(), mat }
}

/// Kraus operators from the spectral decomposition of `j`: each eigenvector
/// with eigenvalue above `tol` is devectorized and scaled by `sqrt(lambda)`.
///
/// The result is trace preserving exactly when `j` is.
pub fn choi_to_kraus(j: &ChoiMatrix, tol: f64) -> Result<KrausSet> {
    let d = j.dim();
    let herm = linalg::hermitian_part(j.as_mat());
    let eig = linalg::eigh(herm.as_ref())?;
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min, tol });
        }
    }
    let ops: Vec<CMat> = eig
        .values
        .iter()
        .enumerate()
        .take_while(|(_, &lambda)| lambda > tol)
        .map(|(col, &lambda)| {
            let scale = lambda.sqrt();
            Mat::from_fn(d, d, |a, b| eig.vectors[(a * d + b, col)] * scale)
        })
        .collect();
    if ops.is_empty() {
        return Err(Error::InvalidParameter("Choi matrix has no eigenvalue above tolerance".into()));
    }
    KrausSet::new_unchecked(ops)
}

/// The `d` diagonal blocks `B_q[n, m] = J[(q,n),(q,m)]`.
pub fn diagonal_blocks(j: &ChoiMatrix) -> Vec<CMat> {
    (0..j.dim()).map(|q| j.block(q, q)).collect()
}

/// Number of Choi eigenvalues above `tol` times the largest one.
pub fn kraus_rank(j: &ChoiMatrix, tol: f64) -> Result<usize> {
    let herm = linalg::hermitian_part(j.as_mat());
    let values = linalg::eigvalsh(herm.as_ref())?;
    Ok(linalg::numerical_rank(&values, tol))
}

/// Outcome of [`validate_cptp`].
#[derive(Clone, Debug, PartialEq)]
pub struct CptpReport {
    /// Largest entry of `|J - J^dag|`.
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of the Hermitian part of `J`.
    pub min_eigenvalue: f64,
    /// Largest entry of `|sum_q B_q - I|`.
    pub block_sum_deviation: f64,
    pub tol: f64,
    pub valid: bool,
}

impl fmt::Display for CptpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (hermiticity defect {:.3e}, min eigenvalue {:.3e}, block-sum deviation {:.3e}, tol {:.1e})",
            if self.valid { "valid" } else { "invalid" },
            self.hermiticity_defect,
            self.min_eigenvalue,
            self.block_sum_deviation,
            self.tol
        )
    }
}

/// Checks Hermiticity, positivity and trace preservation of a Choi matrix.
pub fn validate_cptp(j: &ChoiMatrix, tol: f64) -> Result<CptpReport> {
    let d = j.dim();
    let hermiticity_defect = linalg::hermiticity_defect(j.as_mat());
    let herm = linalg::hermitian_part(j.as_mat());
    let min_eigenvalue = linalg::eigvalsh(herm.as_ref())?.last().copied().unwrap_or(0.0);
    let mut sum = linalg::zeros(d, d);
    for b in diagonal_blocks(j) {
        sum += b;
    }
    let block_sum_deviation = linalg::max_abs_diff(sum.as_ref(), linalg::identity(d).as_ref());
    let valid = hermiticity_defect <= tol && min_eigenvalue >= -tol && block_sum_deviation <= tol;
    Ok(CptpReport { hermiticity_defect, min_eigenvalue, block_sum_deviation, tol, valid })
}
