use super::{DensityMatrix, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{self, c64};
use crate::random::{ginibre, rng};

/// Random channel with `rank` Kraus operators.
///
/// Draws Ginibre matrices `G_r` and right-normalizes them,
/// `K_r = G_r (sum_s G_s^dag G_s)^{-1/2}`, so `sum K^dag K = I`. With
/// `rank = d^2` the Choi matrix has full rank with probability one; with
/// `rank = 1` the single operator is a unitary.
pub fn random_channel(d: usize, rank: usize, seed: u64) -> Result<KrausSet> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if rank == 0 || rank > d * d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    let mut r = rng(seed);
    let gs: Vec<_> = (0..rank).map(|_| ginibre(&mut r, d, d)).collect();
    let mut gram = linalg::zeros(d, d);
    for g in &gs {
        gram += g.adjoint() * g;
    }
    let norm = linalg::inverse_sqrt_pd(gram.as_ref())?;
    KrausSet::new(gs.iter().map(|g| g * &norm).collect())
}

/// Random full-rank density matrix `G G^dag / Tr(G G^dag)` with `G` Ginibre
/// (Hilbert-Schmidt measure).
pub fn random_density(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut r = rng(seed);
    let g = ginibre(&mut r, d, d);
    let w = &g * g.adjoint();
    let tr = linalg::trace(w.as_ref()).re;
    let rho = linalg::hermitian_part((w * faer::Scale(c64::new(1.0 / tr, 0.0))).as_ref());
    Ok(DensityMatrix::new_unchecked(rho))
}
