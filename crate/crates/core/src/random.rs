//! Seeded random matrices: complex Ginibre matrices and Haar unitaries.
//!
//! All randomness in the crate flows through [`rng`], a ChaCha8 stream keyed
//! by a `u64` seed, so results are reproducible across platforms.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c64, CMat};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for sub-stream `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian(rng: &mut Rng) -> c64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians, filled row by row.
pub fn ginibre(rng: &mut Rng, rows: usize, cols: usize) -> CMat {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary: Gram-Schmidt on a Ginibre matrix. The implied `R`
/// factor has a positive real diagonal, which fixes the column phases.
pub fn haar_unitary_with(rng: &mut Rng, d: usize) -> CMat {
    let mut q = ginibre(rng, d, d);
    for c in 0..d {
        // Two passes of modified Gram-Schmidt for orthogonality at 1e-15.
        for _ in 0..2 {
            for p in 0..c {
                let mut proj = crate::linalg::ZERO;
                for r in 0..d {
                    proj += q[(r, p)].conj() * q[(r, c)];
                }
                for r in 0..d {
                    let v = q[(r, p)];
                    q[(r, c)] -= v * proj;
                }
            }
        }
        let norm = (0..d).map(|r| q[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..d {
            q[(r, c)] /= norm;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn complex_gaussian_has_unit_second_moment() {
        let mut r = rng(3);
        let n = 20_000;
        let m2: f64 = (0..n).map(|_| complex_gaussian(&mut r).norm_sqr()).sum::<f64>() / n as f64;
        assert!((m2 - 1.0).abs() < 0.05);
    }
}
