use faer::Mat;

use super::{diagonal_blocks, ChoiMatrix, DensityMatrix, KrausSet, ProbabilityVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `E(rho) = sum_r K_r rho K_r^dag`.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(k.dim(), rho.dim())?;
    let mut out = linalg::zeros(k.dim(), k.dim());
    for op in k.ops() {
        out += op * rho.as_mat() * op.adjoint();
    }
    Ok(DensityMatrix::new_unchecked(out))
}

/// Channel action read off the Choi matrix:
/// `E(rho)[a, b] = sum_{n,m} J[(a,n),(b,m)] rho[n, m]`.
///
/// Works for any `d^2 x d^2` matrix, so it also evaluates non-CPTP iterates.
pub fn apply_choi(j: &ChoiMatrix, rho: &DensityMatrix) -> Result<CMat> {
    let d = j.dim();
    check_dim(d, rho.dim())?;
    let jm = j.as_mat();
    let r = rho.as_mat();
    Ok(Mat::from_fn(d, d, |a, b| {
        let mut acc = linalg::ZERO;
        for n in 0..d {
            for m in 0..d {
                acc += jm[(a * d + n, b * d + m)] * r[(n, m)];
            }
        }
        acc
    }))
}

/// Computational-basis outcome probabilities `<q|E(rho)|q>` from the Kraus
/// action.
pub fn outcome_distribution(k: &KrausSet, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    check_dim(k.dim(), rho.dim())?;
    let d = k.dim();
    let r = rho.as_mat();
    let mut probs = vec![0.0; d];
    for op in k.ops() {
        for (q, p) in probs.iter_mut().enumerate() {
            // <q|K rho K^dag|q> = sum_{n,m} K[q,n] rho[n,m] conj(K[q,m])
            let mut acc = linalg::ZERO;
            for n in 0..d {
                let kn = op[(q, n)];
                if kn == linalg::ZERO {
                    continue;
                }
                for m in 0..d {
                    acc += kn * r[(n, m)] * op[(q, m)].conj();
                }
            }
            *p += acc.re;
        }
    }
    Ok(ProbabilityVector::new_unchecked(probs))
}

/// Outcome probabilities as the bilinear form `sum_{n,m} B_q[n,m] rho[n,m]`
/// of the diagonal Choi blocks.
pub fn outcome_distribution_from_choi(j: &ChoiMatrix, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    check_dim(j.dim(), rho.dim())?;
    let d = j.dim();
    let r = rho.as_mat();
    let probs = diagonal_blocks(j)
        .iter()
        .map(|b| {
            let mut acc = linalg::ZERO;
            for n in 0..d {
                for m in 0..d {
                    acc += b[(n, m)] * r[(n, m)];
                }
            }
            acc.re
        })
        .collect();
    Ok(ProbabilityVector::new_unchecked(probs))
}
