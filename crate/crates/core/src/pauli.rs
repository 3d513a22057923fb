//! N-qubit Pauli channels.
//!
//! Pauli strings are indexed in base 4 with qubit 0 as the most significant
//! digit and the one-qubit order `I, X, Y, Z`. Each string has a bit-pair
//! encoding `(x, z)` with `P = i^{x.z} X^x Z^z` per qubit, so `P|b> =
//! i^{|x&z|} (-1)^{|z&b|} |b ^ x>`. Computational basis states also use
//! qubit 0 as the most significant bit.

use faer::Mat;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::chanrep::{ChoiMatrix, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};
use crate::random::rng;

const PROB_TOL: f64 = 1e-10;

/// `(x, z)` bit masks of Pauli string `index` on `n` qubits.
pub fn string_bits(n: usize, index: usize) -> (usize, usize) {
    let (mut x, mut z) = (0, 0);
    for q in 0..n {
        let digit = (index >> (2 * (n - 1 - q))) & 3;
        let bit = 1 << (n - 1 - q);
        match digit {
            1 => x |= bit,
            2 => {
                x |= bit;
                z |= bit
            }
            3 => z |= bit,
            _ => {}
        }
    }
    (x, z)
}

/// Inverse of [`string_bits`].
pub fn string_index(n: usize, x: usize, z: usize) -> usize {
    let mut index = 0;
    for q in 0..n {
        let bit = 1 << (n - 1 - q);
        let digit = match (x & bit != 0, z & bit != 0) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        };
        index = (index << 2) | digit;
    }
    index
}

/// Label such as `"XIZ"`.
pub fn string_label(n: usize, index: usize) -> String {
    (0..n).map(|q| ['I', 'X', 'Y', 'Z'][(index >> (2 * (n - 1 - q))) & 3]).collect()
}

fn phase(x: usize, z: usize, b: usize) -> c64 {
    let k = (x & z).count_ones() as usize + 2 * ((z & b).count_ones() as usize);
    [linalg::ONE, linalg::I, -linalg::ONE, -linalg::I][k % 4]
}

/// Dense matrix of Pauli string `index`.
pub fn pauli_string(n: usize, index: usize) -> CMat {
    let d = 1 << n;
    let (x, z) = string_bits(n, index);
    let mut m = linalg::zeros(d, d);
    for b in 0..d {
        m[(b ^ x, b)] = phase(x, z, b);
    }
    m
}

/// Mixture of Pauli-string conjugations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliChannel {
    n_qubits: usize,
    alphas: Vec<f64>,
}

impl PauliChannel {
    /// `alphas` must have length `4^N` for some `N >= 1`, be non-negative and
    /// sum to one.
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        let len = alphas.len();
        let n = (1..=16).find(|&n| 1usize << (2 * n) == len).ok_or_else(|| {
            Error::InvalidProbabilities(format!("{len} coefficients is not 4^N for N >= 1"))
        })?;
        if let Some((i, a)) = alphas.iter().enumerate().find(|(_, a)| !(**a >= -PROB_TOL)) {
            return Err(Error::InvalidProbabilities(format!("coefficient {i} is {a}")));
        }
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!("coefficients sum to {total}")));
        }
        Ok(Self { n_qubits: n, alphas })
    }

    pub fn identity(n: usize) -> Self {
        let mut alphas = vec![0.0; 1 << (2 * n)];
        alphas[0] = 1.0;
        Self { n_qubits: n, alphas }
    }

    /// Coefficients drawn uniformly from the simplex.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > 10 {
            return Err(Error::InvalidParameter(format!("qubit count {n} outside 1..=10")));
        }
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..1usize << (2 * n)).map(|_| Exp1.sample(&mut r)).collect();
        let total: f64 = raw.iter().sum();
        Ok(Self { n_qubits: n, alphas: raw.iter().map(|x: &f64| x / total).collect() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `{sqrt(alpha_j) P_j}` over the nonzero coefficients.
    pub fn kraus(&self) -> KrausSet {
        let ops = self
            .alphas
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0.0)
            .map(|(i, a)| pauli_string(self.n_qubits, i) * faer::Scale(c64::new(a.sqrt(), 0.0)))
            .collect();
        KrausSet::new(ops).expect("Pauli Kraus operators are trace preserving")
    }

    /// `sum alpha vec(P) vec(P)^dag`, built from the monomial structure.
    pub fn choi(&self) -> ChoiMatrix {
        let n = self.n_qubits;
        let d = self.dim();
        let mut j = linalg::zeros(d * d, d * d);
        for (index, &a) in self.alphas.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let (x, z) = string_bits(n, index);
            for b in 0..d {
                let vb = phase(x, z, b) * a;
                let row = (b ^ x) * d + b;
                for c in 0..d {
                    j[(row, (c ^ x) * d + c)] += vb * phase(x, z, c).conj();
                }
            }
        }
        ChoiMatrix::from_matrix(j).expect("square by construction")
    }

    /// Number of nonzero coefficients.
    pub fn support(&self) -> usize {
        self.alphas.iter().filter(|a| **a > 0.0).count()
    }
}

/// Pauli channel with the given coefficients.
pub fn pauli_channel(alphas: &[f64]) -> Result<PauliChannel> {
    PauliChannel::new(alphas.to_vec())
}

/// Partition of the `4^N` string indices by x-component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternGroups {
    n_qubits: usize,
    /// `groups[x]` lists the indices with x-mask `x`, ascending.
    groups: Vec<Vec<usize>>,
}

impl PatternGroups {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// The `z = 0` member of group `x`.
    pub fn representative(&self, x: usize) -> usize {
        string_index(self.n_qubits, x, 0)
    }
}

pub fn pattern_groups(n: usize) -> Result<PatternGroups> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidParameter(format!("qubit count {n} out of range")));
    }
    let mut groups = vec![Vec::with_capacity(1 << n); 1 << n];
    for index in 0..1usize << (2 * n) {
        groups[string_bits(n, index).0].push(index);
    }
    Ok(PatternGroups { n_qubits: n, groups })
}

/// Row-major positions of the nonzero entries of `vec(P)`.
pub fn vec_support(n: usize, index: usize) -> Vec<usize> {
    let d = 1 << n;
    let (x, _) = string_bits(n, index);
    let mut s: Vec<usize> = (0..d).map(|b| (b ^ x) * d + b).collect();
    s.sort_unstable();
    s
}

/// Moves each group's total weight onto its representative. The result has
/// at most `2^N` nonzero coefficients and the same diagonal Choi blocks.
pub fn analytic_reduce(p: &PauliChannel) -> PauliChannel {
    let n = p.n_qubits;
    let mut alphas = vec![0.0; p.alphas.len()];
    for (index, a) in p.alphas.iter().enumerate() {
        alphas[string_index(n, string_bits(n, index).0, 0)] += a;
    }
    PauliChannel { n_qubits: n, alphas }
}

fn check_qubit(alpha: &[f64]) -> Result<[f64; 4]> {
    let a: [f64; 4] = alpha
        .try_into()
        .map_err(|_| Error::InvalidParameter(format!("one-qubit transform needs 4 coefficients, got {}", alpha.len())))?;
    PauliChannel::new(a.to_vec())?;
    Ok(a)
}

/// One-qubit Type-I transform with real gauge `beta`: both coherence
/// differences `a0 - a3` and `a1 - a2` are scaled by `beta`, sums kept.
pub fn pauli_type1(alpha: &[f64], beta: f64) -> Result<[f64; 4]> {
    let a = check_qubit(alpha)?;
    if !(beta.abs() <= 1.0) {
        return Err(Error::GaugeOutOfRange(beta));
    }
    let (s03, d03) = (a[0] + a[3], a[0] - a[3]);
    let (s12, d12) = (a[1] + a[2], a[1] - a[2]);
    Ok([(s03 + beta * d03) / 2.0, (s12 + beta * d12) / 2.0, (s12 - beta * d12) / 2.0, (s03 - beta * d03) / 2.0])
}

/// One-qubit Type-II shift `(a0 + g/2, a1 + b/2, a2 - b/2, a3 - g/2)`.
pub fn pauli_type2(alpha: &[f64], beta: f64, gamma: f64) -> Result<[f64; 4]> {
    let a = check_qubit(alpha)?;
    let out = [a[0] + gamma / 2.0, a[1] + beta / 2.0, a[2] - beta / 2.0, a[3] - gamma / 2.0];
    if out.iter().any(|v| *v < -PROB_TOL) {
        return Err(Error::InvalidProbabilities(format!(
            "shift (beta={beta}, gamma={gamma}) leaves the simplex: {out:?}"
        )));
    }
    Ok(out)
}

/// Type-II parameters reproducing `pauli_type1(alpha, beta)`.
pub fn type1_as_type2(alpha: &[f64], beta: f64) -> Result<(f64, f64)> {
    let a = check_qubit(alpha)?;
    Ok(((beta - 1.0) * (a[1] - a[2]), (beta - 1.0) * (a[0] - a[3])))
}

/// Feasible `(beta, gamma)` rectangle of [`pauli_type2`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibleRegion {
    pub beta: (f64, f64),
    pub gamma: (f64, f64),
}

pub fn feasible_region(alpha: &[f64]) -> Result<FeasibleRegion> {
    let a = check_qubit(alpha)?;
    Ok(FeasibleRegion { beta: (-2.0 * a[1], 2.0 * a[2]), gamma: (-2.0 * a[0], 2.0 * a[3]) })
}

/// Vertex positions of the simplex embedding, in `I, X, Y, Z` order.
pub const TETRAHEDRON: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

pub fn embed(alpha: &[f64; 4]) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (a, v) in alpha.iter().zip(TETRAHEDRON.iter()) {
        for k in 0..3 {
            p[k] += a * v[k];
        }
    }
    p
}

/// One row of the geometry dataset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotPoint {
    pub label: &'static str,
    pub alpha: [f64; 4],
    pub xyz: [f64; 3],
}

impl PlotPoint {
    fn new(label: &'static str, alpha: [f64; 4]) -> Self {
        Self { label, alpha, xyz: embed(&alpha) }
    }
}

/// Geometry of the one-qubit classes: the simplex vertices, the channel
/// itself, its Type-I line (`resolution` points over `beta in [-1, 1]`), its
/// Type-II plane (`resolution^2` grid over the feasible rectangle) and the
/// line of Type-I invariant channels.
pub fn tetrahedron_data(alpha: &[f64], resolution: usize) -> Result<Vec<PlotPoint>> {
    let a = check_qubit(alpha)?;
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be at least 2, got {resolution}")));
    }
    let step = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (resolution - 1) as f64;
    let clip = |v: [f64; 4]| v.map(|x| x.max(0.0));
    let mut out: Vec<PlotPoint> = (0..4)
        .map(|i| {
            let mut e = [0.0; 4];
            e[i] = 1.0;
            PlotPoint::new("vertex", e)
        })
        .collect();
    out.push(PlotPoint::new("alpha", a));
    for k in 0..resolution {
        out.push(PlotPoint::new("type1", clip(pauli_type1(&a, step(-1.0, 1.0, k))?)));
    }
    let region = feasible_region(&a)?;
    for kb in 0..resolution {
        for kg in 0..resolution {
            let beta = step(region.beta.0, region.beta.1, kb);
            let gamma = step(region.gamma.0, region.gamma.1, kg);
            out.push(PlotPoint::new("type2", clip(pauli_type2(&a, beta, gamma)?)));
        }
    }
    for k in 0..resolution {
        let t = step(0.0, 1.0, k);
        out.push(PlotPoint::new("invariant", [(1.0 - t) / 2.0, t / 2.0, t / 2.0, (1.0 - t) / 2.0]));
    }
    Ok(out)
}

/// Distance of `candidate` from the Type-II plane through `alpha`, measured
/// on the two conserved sums.
pub fn type2_plane_residual(alpha: &[f64; 4], candidate: &[f64; 4]) -> f64 {
    ((alpha[0] + alpha[3]) - (candidate[0] + candidate[3])).abs()
        + ((alpha[1] + alpha[2]) - (candidate[1] + candidate[2])).abs()
}

/// Writes the dataset as comma-separated text with header
/// `label,a0,a1,a2,a3,x,y,z`.
pub fn write_plot_dataset<W: std::io::Write>(mut w: W, points: &[PlotPoint]) -> Result<()> {
    let io = |e: std::io::Error| Error::Format(e.to_string());
    writeln!(w, "label,a0,a1,a2,a3,x,y,z").map_err(io)?;
    for p in points {
        let [a0, a1, a2, a3] = p.alpha;
        let [x, y, z] = p.xyz;
        writeln!(w, "{},{a0:e},{a1:e},{a2:e},{a3:e},{x:e},{y:e},{z:e}", p.label).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Nullity of `alpha -> diagonal Choi blocks` on `R^{4^N}`: the number of
/// Pauli coefficient directions invisible to basis measurement.
pub fn type2_pauli_dimension(n: usize, tol: f64) -> Result<usize> {
    let m = 1usize << (2 * n);
    let d = 1usize << n;
    let cols: Vec<ChoiMatrix> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            PauliChannel { n_qubits: n, alphas: e }.choi()
        })
        .collect();
    let mut rows = Vec::new();
    for q in 0..d {
        for r in 0..d {
            for c in 0..d {
                let entries: Vec<c64> = cols.iter().map(|j| j.as_mat()[(q * d + r, q * d + c)]).collect();
                rows.push(entries.iter().map(|z| z.re).collect::<Vec<_>>());
                rows.push(entries.iter().map(|z| z.im).collect::<Vec<_>>());
            }
        }
    }
    Ok(m - linalg::real_rank(&rows, m, tol)?)
}

/// Dimension of the Type-I gauge directions that keep `p` a Pauli channel:
/// the nullity of `dA -> (1 - Pi)(dA o J)` over zero-diagonal Hermitian
/// `dA`, where `Pi` projects onto the real span of Pauli Choi matrices.
pub fn type1_pauli_dimension(p: &PauliChannel, tol: f64) -> Result<usize> {
    let n = p.n_qubits;
    let d = p.dim();
    let j = p.choi();
    let basis: Vec<ChoiMatrix> = (0..1usize << (2 * n))
        .map(|i| {
            let mut e = vec![0.0; 1 << (2 * n)];
            e[i] = 1.0;
            PauliChannel { n_qubits: n, alphas: e }.choi()
        })
        .collect();
    let norm2 = (d * d) as f64;
    let mut directions: Vec<CMat> = Vec::new();
    for i in 0..d {
        for k in i + 1..d {
            for v in [linalg::ONE, linalg::I] {
                let mut da = linalg::zeros(d, d);
                da[(i, k)] = v;
                da[(k, i)] = v.conj();
                directions.push(da);
            }
        }
    }
    let ncols = directions.len();
    let residuals: Vec<CMat> = directions
        .iter()
        .map(|da| {
            let dd = d * d;
            let mut m = Mat::from_fn(dd, dd, |r, c| da[(r / d, c / d)] * j.as_mat()[(r, c)]);
            for v in &basis {
                let mut overlap = 0.0;
                for r in 0..dd {
                    for c in 0..dd {
                        overlap += (v.as_mat()[(r, c)].conj() * m[(r, c)]).re;
                    }
                }
                m -= v.as_mat() * faer::Scale(c64::new(overlap / norm2, 0.0));
            }
            m
        })
        .collect();
    let dd = d * d;
    let mut rows = Vec::with_capacity(2 * dd * dd);
    for r in 0..dd {
        for c in 0..dd {
            rows.push(residuals.iter().map(|m| m[(r, c)].re).collect::<Vec<_>>());
            rows.push(residuals.iter().map(|m| m[(r, c)].im).collect::<Vec<_>>());
        }
    }
    Ok(ncols - linalg::real_rank(&rows, ncols, tol)?)
}
