//! Kraus-rank minimization inside a spoofing class.
//!
//! Every diagonal Choi block `B_q` is a principal submatrix of `J`, so
//! `rank J >= max_q rank B_q`. [`sinkhorn_minimize`] alternates between the
//! set of rank-`d` PSD matrices and the affine set of matrices sharing the
//! original diagonal blocks until the `(d+1)`-th eigenvalue vanishes.

use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::chanrep::{diagonal_blocks, kraus_rank, validate_cptp, ChoiMatrix, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::random::{complex_gaussian, rng};
use crate::spoofing::{same_class, Mode};

/// Parameters of [`sinkhorn_minimize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerConfig {
    /// Stop once `lambda_{d+1} <= epsilon * lambda_1`.
    pub epsilon: f64,
    pub max_iters: usize,
    pub mode: Mode,
    /// Seeds the optional initial perturbation.
    pub seed: u64,
    /// Scale of a random Hermitian perturbation added to the off-diagonal
    /// blocks before the first step. Zero gives the deterministic procedure.
    pub perturbation: f64,
    /// Stop unconverged once this much wall time has passed.
    #[serde(default)]
    pub time_limit: Option<Duration>,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self { epsilon: 1e-10, max_iters: 10_000, mode: Mode::Operational, seed: 0, perturbation: 0.0, time_limit: None }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.perturbation >= 0.0) {
            return Err(Error::InvalidParameter(format!("perturbation must be non-negative, got {}", self.perturbation)));
        }
        Ok(())
    }
}

/// Spectrum of one iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// All `d^2` eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `lambda_{d+1}`.
    pub pivot: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    /// Number of iterations run. Each one decomposes the current iterate and,
    /// unless it has converged, projects it; an input already of rank `d`
    /// takes one.
    pub iterations: usize,
    pub wall_time: Duration,
}

impl ConvergenceTrace {
    pub fn pivots(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.pivot).collect()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    /// The converged iterate, or the iterate with the smallest relative
    /// pivot when `converged` is false.
    pub choi: ChoiMatrix,
    pub trace: ConvergenceTrace,
    pub converged: bool,
}

/// Largest numerical rank among the diagonal Choi blocks; `tol` is relative
/// to each block's largest eigenvalue.
pub fn rank_lower_bound(j: &ChoiMatrix, tol: f64) -> Result<usize> {
    let mut best = 0;
    for b in diagonal_blocks(j) {
        let vals = linalg::eigvalsh(linalg::hermitian_part(b.as_ref()).as_ref())?;
        best = best.max(linalg::numerical_rank(&vals, tol));
    }
    Ok(best)
}

fn reset_diagonal_blocks(j: &mut CMat, original: &[CMat], d: usize) {
    for (q, b) in original.iter().enumerate() {
        linalg::set_block(j, d, q, q, b.as_ref());
    }
}

fn remove_off_diagonal_traces(j: &mut CMat, d: usize) {
    let scale = 1.0 / d as f64;
    for p in 0..d {
        for q in 0..d {
            if p == q {
                continue;
            }
            let mut tr = linalg::ZERO;
            for a in 0..d {
                tr += j[(p * d + a, q * d + a)];
            }
            let shift = tr * scale;
            for a in 0..d {
                j[(p * d + a, q * d + a)] -= shift;
            }
        }
    }
}

fn symmetrize(j: &CMat) -> CMat {
    linalg::hermitian_part(j.as_ref())
}

fn perturb_off_diagonal(j: &mut CMat, d: usize, scale: f64, seed: u64) {
    let mut r = rng(seed);
    let n = d * d;
    for row in 0..n {
        for col in row + 1..n {
            if row / d != col / d {
                let z = complex_gaussian(&mut r) * scale;
                j[(row, col)] += z;
                j[(col, row)] += z.conj();
            }
        }
    }
}

/// Keeps the `d` largest eigenpairs, clamping negative eigenvalues to zero.
fn truncate(eig: &linalg::HermitianEigen, d: usize) -> CMat {
    let n = eig.values.len();
    let u = eig.vectors.as_ref().subcols(0, d);
    let scaled = Mat::from_fn(n, d, |r, c| u[(r, c)] * eig.values[c].max(0.0));
    &scaled * u.adjoint()
}

/// Alternating projection towards a rank-`d` member of the class of `j`.
///
/// Each step truncates to the `d` largest eigenvalues, restores the original
/// diagonal blocks, makes off-diagonal blocks traceless in paper-strict mode,
/// and symmetrizes. Non-convergence within `max_iters` or `time_limit` is
/// reported through `converged`, not as an error.
pub fn sinkhorn_minimize(j: &ChoiMatrix, cfg: &MinimizerConfig) -> Result<MinimizeOutcome> {
    cfg.validate()?;
    let report = validate_cptp(j, DEFAULT_TOL)?;
    if !report.valid {
        return Err(Error::NotCptp { tol: DEFAULT_TOL, report: report.to_string() });
    }
    let start = Instant::now();
    let d = j.dim();
    let fixed = diagonal_blocks(j);
    let mut cur = j.as_mat().to_owned();
    if cfg.perturbation > 0.0 {
        perturb_off_diagonal(&mut cur, d, cfg.perturbation, cfg.seed);
    }
    if cfg.mode == Mode::PaperStrict {
        remove_off_diagonal_traces(&mut cur, d);
    }
    let mut trace = ConvergenceTrace::default();
    let mut best: Option<(f64, CMat)> = None;
    let mut converged = false;
    for it in 0..cfg.max_iters {
        let eig = linalg::eigh(cur.as_ref())?;
        let l1 = eig.values[0];
        let pivot = eig.values.get(d).copied().unwrap_or(0.0);
        trace.records.push(IterationRecord { iteration: it, eigenvalues: eig.values.clone(), pivot });
        trace.iterations = it + 1;
        let rel = if l1 > 0.0 { pivot / l1 } else { f64::INFINITY };
        if pivot <= cfg.epsilon * l1 {
            converged = true;
            best = Some((rel, cur));
            break;
        }
        if best.as_ref().map_or(true, |(b, _)| rel < *b) {
            best = Some((rel, cur.clone()));
        }
        if it + 1 == cfg.max_iters || cfg.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
        let mut next = truncate(&eig, d);
        reset_diagonal_blocks(&mut next, &fixed, d);
        if cfg.mode == Mode::PaperStrict {
            remove_off_diagonal_traces(&mut next, d);
        }
        cur = symmetrize(&next);
    }
    trace.wall_time = start.elapsed();
    let (_, mat) = best.expect("at least one iterate");
    Ok(MinimizeOutcome { choi: ChoiMatrix::from_matrix(mat)?, trace, converged })
}

/// True iff `candidate` is in the class of `original` and its Kraus rank
/// equals the block rank bound of `original`.
pub fn is_minimal_member(original: &ChoiMatrix, candidate: &ChoiMatrix, tol: f64) -> Result<bool> {
    Ok(same_class(original, candidate, tol)?.same_class
        && kraus_rank(candidate, tol)? == rank_lower_bound(original, tol)?)
}

/// Writes the trace as comma-separated text: a `# d=..,mode=..` comment,
/// a column header, then one row per iteration.
pub fn write_convergence_log<W: Write>(w: W, trace: &ConvergenceTrace, d: usize, mode: Mode) -> Result<()> {
    let mut w = w;
    let io = |e: std::io::Error| Error::Format(e.to_string());
    writeln!(w, "# d={d},mode={mode}").map_err(io)?;
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=d * d).map(|k| format!("lambda_{k}")));
    header.push("pivot".into());
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for r in &trace.records {
        let mut line = r.iteration.to_string();
        for v in &r.eigenvalues {
            line.push(',');
            line.push_str(&format!("{v:e}"));
        }
        line.push_str(&format!(",{:e}", r.pivot));
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Parses a log written by [`write_convergence_log`], returning `d`, the
/// mode and the records.
pub fn read_convergence_log<R: BufRead>(r: R) -> Result<(usize, Mode, Vec<IterationRecord>)> {
    let bad = |msg: &str| Error::Format(format!("convergence log: {msg}"));
    let mut lines = r.lines();
    let mut next = || lines.next().transpose().map_err(|e| Error::Format(e.to_string()));
    let meta = next()?.ok_or_else(|| bad("empty"))?;
    let meta = meta.strip_prefix("# ").ok_or_else(|| bad("missing metadata line"))?;
    let mut d = None;
    let mut mode = None;
    for kv in meta.split(',') {
        match kv.split_once('=') {
            Some(("d", v)) => d = v.parse::<usize>().ok(),
            Some(("mode", v)) => mode = v.parse::<Mode>().ok(),
            _ => return Err(bad("bad metadata")),
        }
    }
    let (d, mode) = (d.ok_or_else(|| bad("missing d"))?, mode.ok_or_else(|| bad("missing mode"))?);
    let header = next()?.ok_or_else(|| bad("missing header"))?;
    if header.split(',').count() != d * d + 2 {
        return Err(bad("header width"));
    }
    let mut records = Vec::new();
    while let Some(line) = next()? {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d * d + 2 {
            return Err(bad("row width"));
        }
        let iteration = fields[0].parse().map_err(|_| bad("iteration"))?;
        let nums: Vec<f64> =
            fields[1..].iter().map(|f| f.parse::<f64>().map_err(|_| bad("number"))).collect::<Result<_>>()?;
        let pivot = nums[d * d];
        records.push(IterationRecord { iteration, eigenvalues: nums[..d * d].to_vec(), pivot });
    }
    Ok((d, mode, records))
}

/// Least-squares slope and R^2 of `log10(y)` against `x`.
pub fn log_linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, y)| *y > 0.0).map(|&(x, y)| (x, y.log10())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}
