//! Channel data model: Kraus, Choi and natural (superoperator)
//! representations, conversions between them, validation, state action and
//! seeded random instances.
//!
//! Conventions used everywhere in the crate:
//!
//! * vectorization is row-major, `vec(M)[i*d + j] = M[i, j]`;
//! * the natural representation is `S = sum_r K_r (x) conj(K_r)`;
//! * the Choi matrix is the reshuffle of `S`, equivalently
//!   `J = sum_r vec(K_r) vec(K_r)^dag`, so `J[(i,j),(k,l)] = sum_r K_r[i,j] conj(K_r[k,l])`
//!   and `Tr J = d`;
//! * trace preservation is `sum_r K_r^dag K_r = I`, which in this convention
//!   means the `d` diagonal `d x d` blocks of `J` sum to the identity.
//!
//! Diagonal block `q` of the Choi matrix is indexed by the *output* basis
//! state `q`, so it alone fixes the probability of measuring `q`.

mod action;
mod convert;
mod random;

pub use action::{apply_channel, apply_choi, outcome_distribution, outcome_distribution_from_choi};
pub use convert::{
    choi_to_kraus, choi_to_superop, diagonal_blocks, kraus_rank, kraus_to_choi, kraus_to_superop,
    reshuffle, superop_to_choi, validate_cptp, CptpReport,
};
pub use random::{random_channel, random_density};

use std::fmt;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};

/// Default validity tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A `d x d` Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates and wraps `mat`.
    pub fn new(mat: CMat, tol: f64) -> Result<Self> {
        let d = mat.nrows();
        if d == 0 || mat.ncols() != d {
            return Err(Error::InvalidDensity { reason: format!("shape {}x{}", d, mat.ncols()) });
        }
        let herm = linalg::hermiticity_defect(mat.as_ref());
        if herm > tol {
            return Err(Error::InvalidDensity { reason: format!("not Hermitian ({herm:e})") });
        }
        let tr = linalg::trace(mat.as_ref());
        if (tr - linalg::ONE).norm() > tol {
            return Err(Error::InvalidDensity { reason: format!("trace {tr} != 1") });
        }
        let min = linalg::eigvalsh(mat.as_ref())?.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensity { reason: format!("negative eigenvalue {min:e}") });
        }
        Ok(Self { mat })
    }

    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[c64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm2 == 0.0 {
            return Err(Error::InvalidDensity { reason: "zero state vector".into() });
        }
        let d = psi.len();
        Ok(Self { mat: Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm2) })
    }

    /// Computational basis state `|i><i|`.
    pub fn basis(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index out of range");
        Self { mat: Mat::from_fn(d, d, |a, b| if a == i && b == i { linalg::ONE } else { linalg::ZERO }) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: linalg::identity(d) * faer::Scale(c64::new(1.0 / d as f64, 0.0)) }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(linalg::diag_real(probs), DEFAULT_TOL)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_inner(self) -> CMat {
        self.mat
    }
}

/// Operator-sum representation `{K_r}` with `sum K_r^dag K_r = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<CMat>,
}

impl KrausSet {
    /// Validates trace preservation at [`DEFAULT_TOL`].
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        Self::with_tol(ops, DEFAULT_TOL)
    }

    pub fn with_tol(ops: Vec<CMat>, tol: f64) -> Result<Self> {
        let set = Self::checked_shapes(ops)?;
        let deviation = set.trace_preservation_defect();
        if deviation > tol {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(set)
    }

    /// Only checks operator shapes; trace preservation is the caller's claim.
    pub(crate) fn new_unchecked(ops: Vec<CMat>) -> Result<Self> {
        Self::checked_shapes(ops)
    }

    fn checked_shapes(ops: Vec<CMat>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKrausSet)?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for k in &ops {
            if k.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.nrows() });
            }
            if k.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.ncols() });
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim: d, ops: vec![linalg::identity(d)] }
    }

    /// Largest entrywise deviation of `sum K^dag K` from the identity.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut acc = linalg::zeros(self.dim, self.dim);
        for k in &self.ops {
            acc += k.adjoint() * k;
        }
        linalg::max_abs_diff(acc.as_ref(), linalg::identity(self.dim).as_ref())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Choi matrix `J`, a `d^2 x d^2` complex matrix in double-index form
/// `J[(i,j),(k,l)]` with row `i*d + j` and column `k*d + l`.
///
/// Construction only checks the shape; use [`validate_cptp`] for the
/// channel conditions. Intermediate iterates of rank minimization are
/// `ChoiMatrix` values that are not yet valid channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    mat: CMat,
}

impl ChoiMatrix {
    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let dim = linalg::choi_dim(mat.as_ref())?;
        Ok(Self { dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_inner(self) -> CMat {
        self.mat
    }

    /// The `d x d` block `(row, col)`.
    pub fn block(&self, row: usize, col: usize) -> CMat {
        linalg::block(self.mat.as_ref(), self.dim, row, col)
    }
}

/// Natural representation `S`, acting on row-major vectorized states.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: CMat,
}

impl Superoperator {
    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let dim = linalg::choi_dim(mat.as_ref())?;
        Ok(Self { dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_inner(self) -> CMat {
        self.mat
    }
}

/// Outcome distribution of a computational-basis measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= -tol)) {
            return Err(Error::InvalidProbabilities(format!("negative entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidProbabilities(format!("sum {total} != 1")));
        }
        Ok(Self(probs))
    }

    pub(crate) fn new_unchecked(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest entrywise difference.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Total variation distance, half the l1 distance.
    pub fn tvd(&self, other: &Self) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

impl fmt::Display for ProbabilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
