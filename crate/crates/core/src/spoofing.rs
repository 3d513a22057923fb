//! Spoofing equivalence classes under computational-basis measurement.
//!
//! Two channels are indistinguishable by preparing arbitrary states and
//! measuring in the computational basis exactly when their diagonal Choi
//! blocks agree. Type-I spoofers post-compose a channel with a phase-gauge
//! map and need no knowledge of the original; Type-II spoofers are arbitrary
//! Choi matrices sharing the diagonal blocks.

use std::fmt;
use std::str::FromStr;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::chanrep::{
    diagonal_blocks, outcome_distribution_from_choi, random_density, validate_cptp, ChoiMatrix, DensityMatrix,
    KrausSet, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};
use crate::random::{ginibre, rng};

/// Which conditions define a Type-II class.
///
/// `Operational` fixes only the diagonal Choi blocks. `PaperStrict` also
/// forces every off-diagonal block to be traceless.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Operational,
    #[default]
    PaperStrict,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Operational => "operational",
            Mode::PaperStrict => "paper-strict",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "operational" => Ok(Mode::Operational),
            "paper-strict" => Ok(Mode::PaperStrict),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// `d x d` Hermitian PSD matrix with unit diagonal. Entry `A[i,k]` multiplies
/// Choi block `(i,k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeCore {
    core: CMat,
}

impl GaugeCore {
    pub fn new(core: CMat, tol: f64) -> Result<Self> {
        if core.nrows() != core.ncols() || core.nrows() == 0 {
            return Err(Error::InvalidGaugeCore(format!("shape {}x{}", core.nrows(), core.ncols())));
        }
        if let Some(reason) = gauge_defect(core.as_ref(), tol) {
            return Err(Error::InvalidGaugeCore(reason));
        }
        Ok(Self { core })
    }

    /// All-ones core: the identity gauge.
    pub fn ones(d: usize) -> Self {
        Self { core: Mat::from_fn(d, d, |_, _| linalg::ONE) }
    }

    /// Identity core: removes every coherence between output basis states.
    pub fn dephasing(d: usize) -> Self {
        Self { core: linalg::identity(d) }
    }

    /// `(1 - eps) * ones + eps * I`: coherences between output basis states
    /// shrink by `1 - eps`. Valid for `eps` in `[0, 1]`.
    pub fn partial_dephasing(d: usize, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::GaugeOutOfRange(eps));
        }
        let off = c64::new(1.0 - eps, 0.0);
        Ok(Self { core: Mat::from_fn(d, d, |i, k| if i == k { linalg::ONE } else { off }) })
    }

    /// Qubit core `[[1, a], [conj a, 1]]`, valid iff `|a| <= 1`.
    pub fn qubit(a: c64) -> Result<Self> {
        let mut core = linalg::identity(2);
        core[(0, 1)] = a;
        core[(1, 0)] = a.conj();
        Self::new(core, DEFAULT_TOL)
    }

    /// Random Gram matrix of `d` unit vectors in `C^d`.
    pub fn random(d: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let mut v = ginibre(&mut r, d, d);
        for c in 0..d {
            let norm = (0..d).map(|i| v[(i, c)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..d {
                v[(i, c)] /= norm;
            }
        }
        let mut core = v.adjoint() * &v;
        for i in 0..d {
            core[(i, i)] = linalg::ONE;
        }
        Self { core: linalg::hermitian_part(core.as_ref()) }
    }

    pub fn dim(&self) -> usize {
        self.core.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.core.as_ref()
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        linalg::max_abs_diff(self.core.as_ref(), Self::ones(self.dim()).core.as_ref()) <= tol
    }
}

fn gauge_defect(a: MatRef<'_, c64>, tol: f64) -> Option<String> {
    let d = a.nrows();
    let herm = linalg::hermiticity_defect(a);
    if herm > tol {
        return Some(format!("not Hermitian ({herm:e})"));
    }
    for i in 0..d {
        if (a[(i, i)] - linalg::ONE).norm() > tol {
            return Some(format!("diagonal entry {i} is {}", a[(i, i)]));
        }
        for k in 0..d {
            if a[(i, k)].norm() > 1.0 + tol {
                return Some(format!("entry ({i}, {k}) has modulus {} > 1", a[(i, k)].norm()));
            }
        }
    }
    match linalg::eigvalsh(linalg::hermitian_part(a).as_ref()) {
        Ok(vals) => {
            let min = vals.last().copied().unwrap_or(0.0);
            (min < -tol).then(|| format!("not PSD (min eigenvalue {min:e})"))
        }
        Err(_) => Some("eigendecomposition failed".into()),
    }
}

/// True iff `a` is square, Hermitian, unit-diagonal, entrywise bounded by one
/// and has no eigenvalue below `-tol`.
pub fn type1_validate(a: MatRef<'_, c64>, tol: f64) -> bool {
    a.nrows() == a.ncols() && a.nrows() > 0 && gauge_defect(a, tol).is_none()
}

/// Type-I spoofed channel: block `(i,k)` of the Choi matrix scaled by `A[i,k]`.
pub fn type1_apply(j: &ChoiMatrix, g: &GaugeCore) -> Result<ChoiMatrix> {
    let d = j.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    let jm = j.as_mat();
    let out = Mat::from_fn(d * d, d * d, |r, c| g.core[(r / d, c / d)] * jm[(r, c)]);
    ChoiMatrix::from_matrix(out)
}

/// Upper off-diagonal Choi blocks `(i,k)`, `i < k`, in row-major pair order.
/// The lower blocks are implied by Hermiticity.
#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagonalBlocks {
    dim: usize,
    blocks: Vec<CMat>,
}

impl OffDiagonalBlocks {
    pub fn zeros(d: usize) -> Self {
        Self { dim: d, blocks: (0..d * d.saturating_sub(1) / 2).map(|_| linalg::zeros(d, d)).collect() }
    }

    pub fn from_choi(j: &ChoiMatrix) -> Self {
        let d = j.dim();
        Self { dim: d, blocks: pairs(d).map(|(i, k)| j.block(i, k)).collect() }
    }

    fn index(&self, i: usize, k: usize) -> usize {
        assert!(i < k && k < self.dim, "block ({i}, {k}) is not upper off-diagonal");
        i * self.dim - i * (i + 1) / 2 + (k - i - 1)
    }

    pub fn get(&self, i: usize, k: usize) -> &CMat {
        &self.blocks[self.index(i, k)]
    }

    pub fn set(&mut self, i: usize, k: usize, block: CMat) -> Result<()> {
        if block.nrows() != self.dim || block.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: block.nrows() });
        }
        let idx = self.index(i, k);
        self.blocks[idx] = block;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |i| (i + 1..d).map(move |k| (i, k)))
}

/// Equivalence class of a channel: its diagonal Choi blocks and the mode.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeIIFamily {
    dim: usize,
    fixed_blocks: Vec<CMat>,
    mode: Mode,
}

impl TypeIIFamily {
    /// Checks that the blocks are Hermitian PSD and sum to the identity.
    pub fn new(fixed_blocks: Vec<CMat>, mode: Mode, tol: f64) -> Result<Self> {
        let d = fixed_blocks.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut sum = linalg::zeros(d, d);
        for (q, b) in fixed_blocks.iter().enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: b.nrows() });
            }
            if linalg::hermiticity_defect(b.as_ref()) > tol {
                return Err(Error::InvalidParameter(format!("fixed block {q} is not Hermitian")));
            }
            let min = linalg::eigvalsh(b.as_ref())?.last().copied().unwrap_or(0.0);
            if min < -tol {
                return Err(Error::PsdViolation { min_eigenvalue: min });
            }
            sum += b;
        }
        let deviation = linalg::max_abs_diff(sum.as_ref(), linalg::identity(d).as_ref());
        if deviation > tol {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { dim: d, fixed_blocks, mode })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn fixed_blocks(&self) -> &[CMat] {
        &self.fixed_blocks
    }

    /// Membership: matching diagonal blocks, PSD, and traceless off-diagonal
    /// blocks in paper-strict mode.
    pub fn contains(&self, j: &ChoiMatrix, tol: f64) -> bool {
        if j.dim() != self.dim {
            return false;
        }
        let blocks_match =
            diagonal_blocks(j).iter().zip(&self.fixed_blocks).all(|(b, f)| linalg::max_abs_diff(b.as_ref(), f.as_ref()) <= tol);
        blocks_match
            && linalg::hermiticity_defect(j.as_mat()) <= tol
            && (self.mode == Mode::Operational || traceless_violation(j, tol).is_none())
            && linalg::eigvalsh(linalg::hermitian_part(j.as_mat()).as_ref())
                .map(|v| v.last().copied().unwrap_or(0.0) >= -tol)
                .unwrap_or(false)
    }
}

fn traceless_violation(j: &ChoiMatrix, tol: f64) -> Option<Error> {
    let d = j.dim();
    pairs(d).find_map(|(i, k)| {
        let modulus = linalg::trace(j.block(i, k).as_ref()).norm();
        (modulus > tol).then_some(Error::TracelessViolation { row: i, col: k, modulus })
    })
}

/// Class of `j`, which must be a valid channel.
pub fn type2_family(j: &ChoiMatrix, mode: Mode) -> Result<TypeIIFamily> {
    let report = validate_cptp(j, DEFAULT_TOL)?;
    if !report.valid {
        return Err(Error::NotCptp { tol: DEFAULT_TOL, report: report.to_string() });
    }
    Ok(TypeIIFamily { dim: j.dim(), fixed_blocks: diagonal_blocks(j), mode })
}

/// Assembles the class member with the given upper off-diagonal blocks.
pub fn type2_member(f: &TypeIIFamily, offdiag: &OffDiagonalBlocks, tol: f64) -> Result<ChoiMatrix> {
    let d = f.dim;
    if offdiag.dim != d {
        return Err(Error::DimensionMismatch { expected: d, found: offdiag.dim });
    }
    let mut m = linalg::zeros(d * d, d * d);
    for (q, b) in f.fixed_blocks.iter().enumerate() {
        linalg::set_block(&mut m, d, q, q, b.as_ref());
    }
    for (i, k) in pairs(d) {
        let b = offdiag.get(i, k);
        linalg::set_block(&mut m, d, i, k, b.as_ref());
        linalg::set_block(&mut m, d, k, i, linalg::adjoint(b.as_ref()).as_ref());
    }
    let j = ChoiMatrix::from_matrix(m)?;
    if f.mode == Mode::PaperStrict {
        if let Some(e) = traceless_violation(&j, tol) {
            return Err(e);
        }
    }
    let min = linalg::eigvalsh(j.as_mat())?.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::PsdViolation { min_eigenvalue: min });
    }
    Ok(j)
}

/// Outcome of comparing two channels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpoofReport {
    pub same_class: bool,
    pub choi_differ: bool,
    pub max_block_deviation: f64,
    pub max_distribution_deviation: f64,
}

impl fmt::Display for SpoofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "same_class={} choi_differ={} max_block_deviation={:e} max_distribution_deviation={:e}",
            self.same_class, self.choi_differ, self.max_block_deviation, self.max_distribution_deviation
        )
    }
}

const PROBE_SEED: u64 = 0x05ee_d0fc_1a55;
const RANDOM_PROBES: usize = 50;

/// Deterministic probe set: 50 random full-rank states, the `d` basis
/// states and the coherence probes `|i>+|j>` and `|i>+i|j>` for `i < j`.
pub fn probe_states(d: usize) -> Vec<DensityMatrix> {
    let mut out = Vec::with_capacity(RANDOM_PROBES + d * d);
    for s in 0..RANDOM_PROBES as u64 {
        out.push(random_density(d, crate::random::derive_seed(PROBE_SEED, s)).expect("d > 0"));
    }
    out.extend((0..d).map(|i| DensityMatrix::basis(d, i)));
    for (i, k) in pairs(d) {
        for phase in [linalg::ONE, linalg::I] {
            let mut psi = vec![linalg::ZERO; d];
            psi[i] = linalg::ONE;
            psi[k] = phase;
            out.push(DensityMatrix::pure(&psi).expect("nonzero"));
        }
    }
    out
}

/// Largest outcome-probability difference over [`probe_states`].
pub fn max_distribution_deviation(j1: &ChoiMatrix, j2: &ChoiMatrix) -> Result<f64> {
    let mut worst = 0.0f64;
    for rho in probe_states(j1.dim()) {
        let p = outcome_distribution_from_choi(j1, &rho)?;
        let q = outcome_distribution_from_choi(j2, &rho)?;
        worst = worst.max(p.max_deviation(&q));
    }
    Ok(worst)
}

/// Compares two channels: class membership from the diagonal blocks, Choi
/// inequality entrywise, and distribution agreement over the probe set.
pub fn same_class(j1: &ChoiMatrix, j2: &ChoiMatrix, tol: f64) -> Result<SpoofReport> {
    if j1.dim() != j2.dim() {
        return Err(Error::DimensionMismatch { expected: j1.dim(), found: j2.dim() });
    }
    let max_block_deviation = diagonal_blocks(j1)
        .iter()
        .zip(diagonal_blocks(j2).iter())
        .map(|(a, b)| linalg::max_abs_diff(a.as_ref(), b.as_ref()))
        .fold(0.0, f64::max);
    Ok(SpoofReport {
        same_class: max_block_deviation <= tol,
        choi_differ: linalg::max_abs_diff(j1.as_mat(), j2.as_mat()) > tol,
        max_block_deviation,
        max_distribution_deviation: max_distribution_deviation(j1, j2)?,
    })
}

/// Heisenberg-picture images `E^dag(|i><i|) = sum_r K_r^dag |i><i| K_r`.
pub fn adjoint_basis_images(k: &KrausSet) -> Vec<CMat> {
    let d = k.dim();
    (0..d)
        .map(|i| {
            let mut acc = linalg::zeros(d, d);
            for op in k.ops() {
                let row = op.as_ref().row(i);
                acc += row.adjoint() * row;
            }
            acc
        })
        .collect()
}

/// Family whose free real parameters are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// General Type-I, sized by `d`.
    #[serde(rename = "type1")]
    TypeI,
    /// General Type-II, sized by `d`.
    #[serde(rename = "type2")]
    TypeII,
    /// Type-I within Pauli channels, sized by the qubit count.
    #[serde(rename = "type1-pauli")]
    TypeIPauli,
    /// Type-II within Pauli channels, sized by the qubit count.
    #[serde(rename = "type2-pauli")]
    TypeIIPauli,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::TypeI => "type1",
            FamilyKind::TypeII => "type2",
            FamilyKind::TypeIPauli => "type1-pauli",
            FamilyKind::TypeIIPauli => "type2-pauli",
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, FamilyKind::TypeIPauli | FamilyKind::TypeIIPauli)
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "type1" => Ok(FamilyKind::TypeI),
            "type2" => Ok(FamilyKind::TypeII),
            "type1-pauli" => Ok(FamilyKind::TypeIPauli),
            "type2-pauli" => Ok(FamilyKind::TypeIIPauli),
            other => Err(Error::InvalidParameter(format!("unknown family kind {other:?}"))),
        }
    }
}

/// Number of free real parameters. `size` is the dimension `d` for the
/// general kinds and the qubit count for the Pauli kinds. Only the general
/// Type-II count depends on `mode`.
pub fn count_free_params(kind: FamilyKind, size: usize, mode: Mode) -> Result<u64> {
    if size == 0 {
        return Err(Error::InvalidParameter("size must be positive".into()));
    }
    let overflow = || Error::InvalidParameter(format!("size {size} overflows the parameter count"));
    let n = u32::try_from(size).map_err(|_| overflow())?;
    let pow = |base: u64| base.checked_pow(n).ok_or_else(overflow);
    let d = size as u64;
    let dpow = |e: u32| d.checked_pow(e).ok_or_else(overflow);
    Ok(match kind {
        FamilyKind::TypeI => dpow(2)? - d,
        FamilyKind::TypeII => match mode {
            Mode::Operational => dpow(4)? - dpow(3)?,
            Mode::PaperStrict => dpow(4)? - dpow(3)? - dpow(2)? + d,
        },
        FamilyKind::TypeIPauli => (pow(4)? - pow(2)?) / 2,
        FamilyKind::TypeIIPauli => pow(4)? - pow(2)?,
    })
}

/// Dimension of the space of Hermitian perturbations `dJ` that keep every
/// diagonal block fixed (and, in paper-strict mode, every off-diagonal
/// block traceless), as the nullity of the real constraint system over the
/// `d^4` real coordinates of a Hermitian `d^2 x d^2` matrix.
pub fn numeric_class_dimension(j: &ChoiMatrix, mode: Mode, tol: f64) -> Result<usize> {
    let d = j.dim();
    let n = d * d;
    // Coordinates: n diagonal reals, then (re, im) for each r < c.
    let upper = |r: usize, c: usize| n + 2 * (r * n - r * (r + 1) / 2 + (c - r - 1));
    let ncols = n * n;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let unit = |idx: usize, v: f64| {
        let mut row = vec![0.0; ncols];
        row[idx] = v;
        row
    };
    for q in 0..d {
        for a in 0..d {
            let r = q * d + a;
            rows.push(unit(r, 1.0));
            for b in a + 1..d {
                let c = q * d + b;
                rows.push(unit(upper(r, c), 1.0));
                rows.push(unit(upper(r, c) + 1, 1.0));
            }
        }
    }
    if mode == Mode::PaperStrict {
        for (i, k) in pairs(d) {
            let mut re = vec![0.0; ncols];
            let mut im = vec![0.0; ncols];
            for a in 0..d {
                let idx = upper(i * d + a, k * d + a);
                re[idx] = 1.0;
                im[idx + 1] = 1.0;
            }
            rows.push(re);
            rows.push(im);
        }
    }
    Ok(ncols - linalg::real_rank(&rows, ncols, tol)?)
}

/// Number of independent Type-I directions at `j`: the rank of
/// `dA -> dA o J` over zero-diagonal Hermitian `dA`. Equals `d^2 - d` when
/// every off-diagonal block of `j` is nonzero.
pub fn numeric_type1_dimension(j: &ChoiMatrix, tol: f64) -> Result<usize> {
    let d = j.dim();
    let jm = j.as_mat();
    let mut rows = Vec::new();
    for (i, k) in pairs(d) {
        for v in [linalg::ONE, linalg::I] {
            let mut row = Vec::with_capacity(4 * d * d);
            for (p, q, s) in [(i, k, v), (k, i, v.conj())] {
                for a in 0..d {
                    for b in 0..d {
                        let z = s * jm[(p * d + a, q * d + b)];
                        row.push(z.re);
                        row.push(z.im);
                    }
                }
            }
            rows.push(row);
        }
    }
    let ncols = 4 * d * d;
    linalg::real_rank(&rows, ncols, tol)
}

/// Recovers a gauge core with `candidate = type1_apply(original, A)` by
/// blockwise least-squares ratios, if one exists. A gauge entry whose block
/// vanishes in `original` is unconstrained and is set to zero.
pub fn gauge_core_for(original: &ChoiMatrix, candidate: &ChoiMatrix, tol: f64) -> Result<Option<GaugeCore>> {
    let d = original.dim();
    if candidate.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: candidate.dim() });
    }
    let mut core = linalg::identity(d);
    for i in 0..d {
        for k in 0..d {
            let b = original.block(i, k);
            let c = candidate.block(i, k);
            let mut num = linalg::ZERO;
            let mut den = 0.0;
            for r in 0..d {
                for s in 0..d {
                    num += b[(r, s)].conj() * c[(r, s)];
                    den += b[(r, s)].norm_sqr();
                }
            }
            let a = if den > tol * tol { num / den } else { linalg::ZERO };
            let residual = (0..d)
                .flat_map(|r| (0..d).map(move |s| (r, s)))
                .map(|(r, s)| (c[(r, s)] - a * b[(r, s)]).norm())
                .fold(0.0, f64::max);
            if residual > tol {
                return Ok(None);
            }
            if i == k && (a - linalg::ONE).norm() > tol && den > tol * tol {
                return Ok(None);
            }
            if i != k {
                core[(i, k)] = a;
            }
        }
    }
    Ok(GaugeCore::new(core, tol).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chanrep::{kraus_to_choi, random_channel};
    use crate::linalg::max_abs_diff;

    fn pauli_choi(a: [f64; 4]) -> ChoiMatrix {
        let m = linalg::from_real_rows(&[
            &[a[0] + a[3], 0.0, 0.0, a[0] - a[3]],
            &[0.0, a[1] + a[2], a[1] - a[2], 0.0],
            &[0.0, a[1] - a[2], a[1] + a[2], 0.0],
            &[a[0] - a[3], 0.0, 0.0, a[0] + a[3]],
        ]);
        ChoiMatrix::from_matrix(m).unwrap()
    }

    const FIG2: [f64; 4] = [0.1, 0.1, 0.1, 0.7];

    #[test]
    fn mode_round_trips_through_strings() {
        for m in [Mode::Operational, Mode::PaperStrict] {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("strict".parse::<Mode>().is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(type1_validate(GaugeCore::ones(3).as_mat(), 1e-12));
        assert!(GaugeCore::qubit(c64::new(0.6, 0.8)).is_ok());
        assert!(GaugeCore::qubit(c64::new(0.3, -0.2)).is_ok());
        assert!(GaugeCore::qubit(c64::new(1.1, 0.0)).is_err());
        // pairwise 0.9 but anti-correlated on one pair: min eigenvalue < 0
        let bad = linalg::from_real_rows(&[&[1.0, 0.9, 0.9], &[0.9, 1.0, -0.9], &[0.9, -0.9, 1.0]]);
        assert!(linalg::eigvalsh(bad.as_ref()).unwrap()[2] < 0.0);
        assert!(!type1_validate(bad.as_ref(), 1e-9));
        let not_unit = linalg::diag_real(&[1.0, 2.0]);
        assert!(!type1_validate(not_unit.as_ref(), 1e-9));
        assert!(!type1_validate(linalg::zeros(2, 3).as_ref(), 1e-9));
    }

    #[test]
    fn partial_dephasing_core() {
        assert_eq!(GaugeCore::partial_dephasing(3, 0.0).unwrap(), GaugeCore::ones(3));
        assert_eq!(GaugeCore::partial_dephasing(3, 1.0).unwrap(), GaugeCore::dephasing(3));
        assert!(type1_validate(GaugeCore::partial_dephasing(4, 0.3).unwrap().as_mat(), 1e-12));
        assert!(GaugeCore::partial_dephasing(2, 1.5).is_err());
    }

    #[test]
    fn random_core_is_valid() {
        for seed in 0..20 {
            let g = GaugeCore::random(4, seed);
            assert!(type1_validate(g.as_mat(), 1e-10));
        }
    }

    #[test]
    fn ones_core_is_identity_map() {
        let j = kraus_to_choi(&random_channel(3, 9, 1).unwrap());
        let out = type1_apply(&j, &GaugeCore::ones(3)).unwrap();
        assert_eq!(out, j);
    }

    #[test]
    fn dephasing_core_zeroes_off_diagonal_blocks() {
        let j = kraus_to_choi(&random_channel(3, 9, 2).unwrap());
        let out = type1_apply(&j, &GaugeCore::dephasing(3)).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let b = out.block(i, k);
                if i == k {
                    assert_eq!(b, j.block(i, k));
                } else {
                    assert_eq!(linalg::max_abs(b.as_ref()), 0.0);
                }
            }
        }
    }

    #[test]
    fn pauli_real_gauge_moves_all_four_coefficients() {
        let out = type1_apply(&pauli_choi(FIG2), &GaugeCore::qubit(c64::new(0.5, 0.0)).unwrap()).unwrap();
        assert!(max_abs_diff(out.as_mat(), pauli_choi([0.25, 0.1, 0.1, 0.55]).as_mat()) < 1e-15);
        assert!(validate_cptp(&out, 1e-12).unwrap().valid);
    }

    #[test]
    fn family_examples() {
        let id = kraus_to_choi(&KrausSet::identity(3));
        let f = type2_family(&id, Mode::PaperStrict).unwrap();
        for (q, b) in f.fixed_blocks().iter().enumerate() {
            let mut e = linalg::zeros(3, 3);
            e[(q, q)] = linalg::ONE;
            assert_eq!(*b, e);
        }
        assert!(f.contains(&id, 1e-12));

        let f = type2_family(&pauli_choi(FIG2), Mode::PaperStrict).unwrap();
        assert!(max_abs_diff(f.fixed_blocks()[0].as_ref(), linalg::diag_real(&[0.8, 0.2]).as_ref()) < 1e-15);
        assert!(max_abs_diff(f.fixed_blocks()[1].as_ref(), linalg::diag_real(&[0.2, 0.8]).as_ref()) < 1e-15);
        assert!(f.contains(&pauli_choi(FIG2), 1e-12));

        let generic = kraus_to_choi(&random_channel(3, 9, 4).unwrap());
        assert!(type2_family(&generic, Mode::Operational).unwrap().contains(&generic, 1e-12));
    }

    #[test]
    fn family_rejects_invalid_channel() {
        let bad = ChoiMatrix::from_matrix(linalg::identity(4)).unwrap();
        assert!(matches!(type2_family(&bad, Mode::Operational), Err(Error::NotCptp { .. })));
    }

    #[test]
    fn zero_off_diagonal_member_is_valid() {
        let j = kraus_to_choi(&random_channel(3, 4, 8).unwrap());
        for mode in [Mode::Operational, Mode::PaperStrict] {
            let f = type2_family(&j, mode).unwrap();
            let m = type2_member(&f, &OffDiagonalBlocks::zeros(3), 1e-12).unwrap();
            assert!(validate_cptp(&m, 1e-12).unwrap().valid);
            assert!(f.contains(&m, 1e-12));
        }
    }

    #[test]
    fn strict_member_needs_traceless_blocks() {
        let f = type2_family(&pauli_choi([0.25; 4]), Mode::PaperStrict).unwrap();
        let mut off = OffDiagonalBlocks::zeros(2);
        // [[a, b], [c, -a]] with three complex parameters
        off.set(0, 1, linalg::from_real_rows(&[&[0.05, 0.1], &[-0.1, -0.05]])).unwrap();
        let m = type2_member(&f, &off, 1e-12).unwrap();
        assert!(same_class(&m, &pauli_choi([0.25; 4]), 1e-12).unwrap().same_class);

        off.set(0, 1, linalg::from_real_rows(&[&[0.05, 0.0], &[0.0, 0.05]])).unwrap();
        assert!(matches!(type2_member(&f, &off, 1e-12), Err(Error::TracelessViolation { row: 0, col: 1, .. })));
        let op = TypeIIFamily { mode: Mode::Operational, ..f };
        assert!(type2_member(&op, &off, 1e-12).is_ok());
    }

    #[test]
    fn member_psd_violation() {
        let f = type2_family(&pauli_choi(FIG2), Mode::Operational).unwrap();
        let mut off = OffDiagonalBlocks::zeros(2);
        off.set(0, 1, linalg::from_real_rows(&[&[0.0, 5.0], &[0.0, 0.0]])).unwrap();
        assert!(matches!(type2_member(&f, &off, 1e-12), Err(Error::PsdViolation { .. })));
    }

    #[test]
    fn pauli_type2_member_example() {
        let f = type2_family(&pauli_choi(FIG2), Mode::PaperStrict).unwrap();
        let target = pauli_choi([0.2, 0.1, 0.1, 0.6]);
        let m = type2_member(&f, &OffDiagonalBlocks::from_choi(&target), 1e-12).unwrap();
        assert!(max_abs_diff(m.as_mat(), target.as_mat()) < 1e-15);
    }

    #[test]
    fn same_class_examples() {
        let j = pauli_choi(FIG2);
        let r = same_class(&j, &j, 1e-12).unwrap();
        assert!(r.same_class && !r.choi_differ);
        assert_eq!(r.max_block_deviation, 0.0);

        let reduced = pauli_choi([0.8, 0.2, 0.0, 0.0]);
        let r = same_class(&j, &reduced, 1e-12).unwrap();
        assert!(r.same_class && r.choi_differ);
        assert!(r.max_distribution_deviation < 1e-15);

        let other = pauli_choi([0.5, 0.2, 0.2, 0.1]);
        let r = same_class(&j, &other, 1e-12).unwrap();
        assert!(!r.same_class);
        assert!(r.max_distribution_deviation > 0.1);

        let d3 = kraus_to_choi(&KrausSet::identity(3));
        assert!(matches!(same_class(&j, &d3, 1e-12), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn probe_set_size_and_determinism() {
        let p = probe_states(3);
        assert_eq!(p.len(), 50 + 3 + 6);
        assert_eq!(p, probe_states(3));
    }

    #[test]
    fn adjoint_images() {
        let imgs = adjoint_basis_images(&KrausSet::identity(3));
        for (i, m) in imgs.iter().enumerate() {
            assert_eq!(*m, DensityMatrix::basis(3, i).into_inner());
        }
        let j = pauli_choi(FIG2);
        let k = crate::chanrep::choi_to_kraus(&j, 1e-12).unwrap();
        let imgs = adjoint_basis_images(&k);
        assert!(max_abs_diff(imgs[0].as_ref(), linalg::diag_real(&[0.8, 0.2]).as_ref()) < 1e-14);
    }

    #[test]
    fn adjoint_images_survive_type1() {
        let k = random_channel(3, 9, 17).unwrap();
        let j = kraus_to_choi(&k);
        let spoofed = type1_apply(&j, &GaugeCore::random(3, 4)).unwrap();
        let ks = crate::chanrep::choi_to_kraus(&spoofed, 1e-12).unwrap();
        for (a, b) in adjoint_basis_images(&k).iter().zip(adjoint_basis_images(&ks).iter()) {
            assert!(max_abs_diff(a.as_ref(), b.as_ref()) < 1e-12);
        }
    }

    #[test]
    fn table_counts() {
        let s = Mode::PaperStrict;
        assert_eq!(count_free_params(FamilyKind::TypeI, 2, s).unwrap(), 2);
        assert_eq!(count_free_params(FamilyKind::TypeII, 2, s).unwrap(), 6);
        assert_eq!(count_free_params(FamilyKind::TypeII, 2, Mode::Operational).unwrap(), 8);
        assert_eq!(count_free_params(FamilyKind::TypeIPauli, 2, s).unwrap(), 6);
        assert_eq!(count_free_params(FamilyKind::TypeIIPauli, 2, s).unwrap(), 12);
        assert_eq!(count_free_params(FamilyKind::TypeII, 3, s).unwrap(), 48);
        assert!(count_free_params(FamilyKind::TypeI, 0, s).is_err());
        assert!(count_free_params(FamilyKind::TypeIIPauli, 40, s).is_err());
        for k in [FamilyKind::TypeI, FamilyKind::TypeII, FamilyKind::TypeIPauli, FamilyKind::TypeIIPauli] {
            assert_eq!(k.as_str().parse::<FamilyKind>().unwrap(), k);
        }
    }

    #[test]
    fn numeric_dimension_examples() {
        let j2 = pauli_choi(FIG2);
        assert_eq!(numeric_class_dimension(&j2, Mode::PaperStrict, 1e-10).unwrap(), 6);
        assert_eq!(numeric_class_dimension(&j2, Mode::Operational, 1e-10).unwrap(), 8);
        let j3 = kraus_to_choi(&random_channel(3, 9, 3).unwrap());
        assert_eq!(numeric_class_dimension(&j3, Mode::PaperStrict, 1e-10).unwrap(), 48);
        assert_eq!(numeric_class_dimension(&j3, Mode::Operational, 1e-10).unwrap(), 54);
    }

    #[test]
    fn type1_dimension_examples() {
        for d in 2..=4 {
            let j = kraus_to_choi(&random_channel(d, d * d, d as u64).unwrap());
            assert_eq!(numeric_type1_dimension(&j, 1e-10).unwrap(), d * d - d);
            let dephased = type1_apply(&j, &GaugeCore::dephasing(d)).unwrap();
            assert_eq!(numeric_type1_dimension(&dephased, 1e-10).unwrap(), 0);
        }
        assert_eq!(numeric_type1_dimension(&pauli_choi(FIG2), 1e-10).unwrap(), 2);
    }

    #[test]
    fn gauge_recovered_for_type1_and_absent_for_generic_type2() {
        let j = kraus_to_choi(&random_channel(2, 4, 5).unwrap());
        let g = GaugeCore::qubit(c64::new(0.3, 0.4)).unwrap();
        let spoofed = type1_apply(&j, &g).unwrap();
        let found = gauge_core_for(&j, &spoofed, 1e-10).unwrap().unwrap();
        assert!(max_abs_diff(found.as_mat(), g.as_mat()) < 1e-10);

        // Type-II member of the completely depolarizing class: its zero
        // off-diagonal block cannot be scaled into a nonzero one.
        let dep = pauli_choi([0.25; 4]);
        let f = type2_family(&dep, Mode::PaperStrict).unwrap();
        let mut off = OffDiagonalBlocks::zeros(2);
        off.set(0, 1, linalg::from_real_rows(&[&[0.0, 0.1], &[0.0, 0.0]])).unwrap();
        let m = type2_member(&f, &off, 1e-12).unwrap();
        assert!(same_class(&dep, &m, 1e-12).unwrap().same_class);
        assert!(gauge_core_for(&dep, &m, 1e-10).unwrap().is_none());
    }
}
