//! Shot-based detection experiments.
//!
//! Both channels act on the same input state and each output is measured
//! `M` times. The statistic is the largest estimated total-variation distance
//! between the two empirical distributions over all tests. Under the null
//! hypothesis every outcome difference `p1_q - p2_q` has standard deviation
//! at most `sqrt(2 p_q (1 - p_q) / M)`, and summing `z` such bands gives
//! `TVD <= z sqrt((d - 1) / (2M))`. The threshold uses that bound with `z`
//! from a two-sided 3-sigma level, Bonferroni-corrected over all outcomes of
//! all tests.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::chanrep::{apply_channel, random_density, DensityMatrix, KrausSet, ProbabilityVector};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};
use crate::random::{derive_seed, haar_unitary_with, rng};

/// Two-sided false-alarm level of a single 3-sigma test.
pub const THREE_SIGMA_ALPHA: f64 = 2.6997960632601857e-3;

const SAMPLING_STREAM: u64 = 0x5a4d_706c_6573;

/// Outcome counts of `shots` computational-basis measurements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl ShotCounts {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.shots as f64).collect()
    }
}

/// Statistic of one test (a basis and input state).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestStatistic {
    pub basis: usize,
    pub probe: usize,
    /// TVD between the two empirical distributions.
    pub estimated_tvd: f64,
    /// TVD between the two exact distributions.
    pub exact_tvd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub statistic: f64,
    pub threshold: f64,
    pub detected: bool,
    pub bases_used: usize,
    pub shots_per_basis: u64,
    /// Largest exact TVD over the same tests.
    pub exact_statistic: f64,
    pub per_test: Vec<TestStatistic>,
}

fn multinomial(probs: &[f64], shots: u64, seed: u64) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let clean: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let total: f64 = clean.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidProbabilities("distribution has no mass".into()));
    }
    let mut r = rng(seed);
    let mut remaining = shots;
    let mut mass = total;
    let mut counts = Vec::with_capacity(clean.len());
    let head = &clean[..clean.len() - 1];
    for p in head {
        let cond = if remaining > 0 && mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, cond)
            .map_err(|e| Error::InvalidProbabilities(e.to_string()))?
            .sample(&mut r);
        counts.push(draw);
        remaining -= draw;
        mass -= p;
    }
    counts.push(remaining);
    Ok(ShotCounts { counts, shots })
}

/// Multinomial draw from the computational-basis distribution of `E(rho)`.
pub fn sample_counts(k: &KrausSet, rho: &DensityMatrix, shots: u64, seed: u64) -> Result<ShotCounts> {
    let p = crate::chanrep::outcome_distribution(k, rho)?;
    multinomial(p.as_slice(), shots, seed)
}

/// Haar-random `d x d` unitary.
pub fn haar_unitary(d: usize, seed: u64) -> Result<CMat> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(haar_unitary_with(&mut rng(seed), d))
}

/// `<q| U sigma U^dag |q>` for each `q`.
fn rotated_distribution(u: &CMat, sigma: &CMat) -> Vec<f64> {
    let m = u * sigma * u.adjoint();
    (0..m.nrows()).map(|q| m[(q, q)].re).collect()
}

fn tvd(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Detection threshold for `tests` comparisons of `d`-outcome distributions
/// with `shots` samples per channel and test.
pub fn detection_threshold(d: usize, shots: u64, tests: usize) -> Result<f64> {
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let per_component = THREE_SIGMA_ALPHA / (tests.max(1) * d.max(1)) as f64;
    let z = normal.inverse_cdf(1.0 - per_component / 2.0);
    Ok(z * ((d.saturating_sub(1)) as f64 / (2.0 * shots as f64)).sqrt())
}

fn check_pair(k1: &KrausSet, k2: &KrausSet, shots: u64) -> Result<()> {
    if k1.dim() != k2.dim() {
        return Err(Error::DimensionMismatch { expected: k1.dim(), found: k2.dim() });
    }
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    Ok(())
}

struct Test<'a> {
    basis: usize,
    probe: usize,
    rotation: Option<&'a CMat>,
    state: &'a DensityMatrix,
}

fn run_tests(k1: &KrausSet, k2: &KrausSet, tests: &[Test<'_>], bases: usize, shots: u64, seed: u64) -> Result<DetectionResult> {
    let d = k1.dim();
    let threshold = detection_threshold(d, shots, tests.len())?;
    let mut per_test = Vec::with_capacity(tests.len());
    for (t, test) in tests.iter().enumerate() {
        let s1 = apply_channel(k1, test.state)?.into_inner();
        let s2 = apply_channel(k2, test.state)?.into_inner();
        let (p1, p2) = match test.rotation {
            Some(u) => (rotated_distribution(u, &s1), rotated_distribution(u, &s2)),
            None => ((0..d).map(|q| s1[(q, q)].re).collect(), (0..d).map(|q| s2[(q, q)].re).collect()),
        };
        let stream = derive_seed(seed ^ SAMPLING_STREAM, t as u64);
        let c1 = multinomial(&p1, shots, derive_seed(stream, 0))?;
        let c2 = multinomial(&p2, shots, derive_seed(stream, 1))?;
        per_test.push(TestStatistic {
            basis: test.basis,
            probe: test.probe,
            estimated_tvd: tvd(&c1.frequencies(), &c2.frequencies()),
            exact_tvd: tvd(&p1, &p2),
        });
    }
    let statistic = per_test.iter().map(|t| t.estimated_tvd).fold(0.0, f64::max);
    let exact_statistic = per_test.iter().map(|t| t.exact_tvd).fold(0.0, f64::max);
    Ok(DetectionResult {
        statistic,
        threshold,
        detected: statistic > threshold,
        bases_used: bases,
        shots_per_basis: shots,
        exact_statistic,
        per_test,
    })
}

/// Compares the channels in the computational basis on `states` seeded
/// random input states.
pub fn fixed_basis_test(k1: &KrausSet, k2: &KrausSet, states: usize, shots: u64, seed: u64) -> Result<DetectionResult> {
    check_pair(k1, k2, shots)?;
    if states == 0 {
        return Err(Error::InvalidParameter("states must be at least 1".into()));
    }
    let d = k1.dim();
    let inputs: Vec<DensityMatrix> =
        (0..states as u64).map(|s| random_density(d, derive_seed(seed, s))).collect::<Result<_>>()?;
    let tests: Vec<Test<'_>> =
        inputs.iter().enumerate().map(|(i, state)| Test { basis: 0, probe: i, rotation: None, state }).collect();
    run_tests(k1, k2, &tests, 1, shots, seed)
}

/// Probe inputs of the randomized test: the uniform superposition and
/// `sum_k i^k |k> / sqrt(d)`.
pub fn coherent_probes(d: usize) -> Vec<DensityMatrix> {
    let uniform = vec![linalg::ONE; d];
    let phased: Vec<c64> = (0..d).map(|k| [linalg::ONE, linalg::I, -linalg::ONE, -linalg::I][k % 4]).collect();
    vec![DensityMatrix::pure(&uniform).expect("nonzero"), DensityMatrix::pure(&phased).expect("nonzero")]
}

/// Measures both channels' outputs on [`coherent_probes`] in `bases` Haar
/// random bases.
pub fn random_basis_detect(k1: &KrausSet, k2: &KrausSet, bases: usize, shots: u64, seed: u64) -> Result<DetectionResult> {
    check_pair(k1, k2, shots)?;
    if bases == 0 {
        return Err(Error::InvalidParameter("bases must be at least 1".into()));
    }
    let d = k1.dim();
    let probes = coherent_probes(d);
    let unitaries: Vec<CMat> = (0..bases as u64).map(|b| haar_unitary(d, derive_seed(seed, b))).collect::<Result<_>>()?;
    let mut tests = Vec::with_capacity(bases * probes.len());
    for (b, u) in unitaries.iter().enumerate() {
        for (p, state) in probes.iter().enumerate() {
            tests.push(Test { basis: b, probe: p, rotation: Some(u), state });
        }
    }
    run_tests(k1, k2, &tests, bases, shots, seed)
}

/// Exact TVD between the two channels' outputs on `rho`, measured in the
/// basis given by the columns of `u^dag`.
pub fn exact_rotated_tvd(k1: &KrausSet, k2: &KrausSet, rho: &DensityMatrix, u: &CMat) -> Result<f64> {
    let s1 = apply_channel(k1, rho)?.into_inner();
    let s2 = apply_channel(k2, rho)?.into_inner();
    Ok(tvd(&rotated_distribution(u, &s1), &rotated_distribution(u, &s2)))
}

/// Exact computational-basis distributions of both channels on `rho`.
pub fn exact_pair(k1: &KrausSet, k2: &KrausSet, rho: &DensityMatrix) -> Result<(ProbabilityVector, ProbabilityVector)> {
    Ok((crate::chanrep::outcome_distribution(k1, rho)?, crate::chanrep::outcome_distribution(k2, rho)?))
}
