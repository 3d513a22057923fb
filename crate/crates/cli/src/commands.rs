use std::path::{Path, PathBuf};

use chanspoof::chanrep::{
    choi_to_kraus, kraus_rank, kraus_to_choi, kraus_to_superop, random_channel, validate_cptp, ChoiMatrix, KrausSet,
};
use chanspoof::detect::{fixed_basis_test, random_basis_detect};
use chanspoof::format::{Channel, ChannelFile, DetectionReport};
use chanspoof::pauli::{
    analytic_reduce, pauli_type1, pauli_type2, tetrahedron_data, type1_pauli_dimension, type2_pauli_dimension,
    write_plot_dataset, PauliChannel,
};
use chanspoof::random::derive_seed;
use chanspoof::rankmin::{rank_lower_bound, sinkhorn_minimize, write_convergence_log, MinimizerConfig};
use chanspoof::spoofing::{
    count_free_params, numeric_class_dimension, numeric_type1_dimension, same_class, FamilyKind, Mode,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::output::{emit, manifest_path, read_to_string, write_atomic, Reporter, RunManifest};
use crate::{Cli, Command, PauliAction, PauliSource, Repr};

/// Files touched by a run, recorded in its manifest.
#[derive(Default)]
struct Files {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut files = Files::default();
    let result = match &cli.command {
        Command::Gen { dim, rank, repr } => gen(cli, &mut files, *dim, *rank, *repr),
        Command::Minimize { input, epsilon, max_iters, perturbation } => {
            let cfg = MinimizerConfig {
                epsilon: *epsilon,
                max_iters: *max_iters,
                mode: effective_mode(cli).unwrap_or_default(),
                seed: cli.seed,
                perturbation: *perturbation,
                time_limit: None,
            };
            minimize(cli, &mut files, input, &cfg)
        }
        Command::Verify { a, b } => verify(cli, &mut files, a, b),
        Command::Pauli { action } => pauli(cli, &mut files, action),
        Command::Detect { a, b, shots, bases, states } => detect(cli, &mut files, a, b, *shots, *bases, *states),
        Command::Count { kind, dim, qubits, numeric } => count(cli, &mut files, *kind, *dim, *qubits, *numeric),
    };
    let finished = matches!(result, Ok(()) | Err(CliError::NotConverged | CliError::NotSameClass));
    if let (true, Some(out)) = (finished, &cli.out) {
        write_manifest(cli, files, out)?;
    }
    result
}

/// Mode in force for the command; `None` where it has no effect.
fn effective_mode(cli: &Cli) -> Option<Mode> {
    match cli.command {
        Command::Minimize { .. } => Some(cli.mode.unwrap_or(Mode::Operational)),
        Command::Count { .. } => Some(cli.mode.unwrap_or(Mode::PaperStrict)),
        _ => cli.mode,
    }
}

fn subcommand(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gen { .. } => "gen",
        Command::Minimize { .. } => "minimize",
        Command::Verify { .. } => "verify",
        Command::Pauli { action: PauliAction::Reduce { .. } } => "pauli reduce",
        Command::Pauli { action: PauliAction::Tetra { .. } } => "pauli tetra",
        Command::Pauli { action: PauliAction::Spoof { .. } } => "pauli spoof",
        Command::Detect { .. } => "detect",
        Command::Count { .. } => "count",
    }
}

fn write_manifest(cli: &Cli, files: Files, out: &Path) -> Result<()> {
    let manifest = RunManifest {
        tool: "chanspoof",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: subcommand(&cli.command),
        argv: std::env::args().skip(1).collect(),
        seed: cli.seed,
        tol: cli.tol,
        mode: effective_mode(cli),
        parameters: &cli.command,
        inputs: files.inputs,
        outputs: files.outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(chanspoof::Error::from)? + "\n";
    write_atomic(&manifest_path(out), text.as_bytes())
}

fn data_reporter(cli: &Cli) -> Reporter {
    Reporter { quiet: cli.quiet, to_stderr: cli.out.is_none() }
}

fn text_reporter(cli: &Cli) -> Reporter {
    Reporter { quiet: cli.quiet, to_stderr: false }
}

fn write_output(cli: &Cli, files: &mut Files, bytes: &[u8]) -> Result<()> {
    emit(cli.out.as_deref(), bytes)?;
    if let Some(out) = &cli.out {
        files.outputs.push(out.clone());
    }
    Ok(())
}

/// Reads and validates a channel file.
fn load(cli: &Cli, files: &mut Files, path: &Path) -> Result<(Channel, ChoiMatrix)> {
    files.inputs.push(path.to_path_buf());
    let text = read_to_string(path)?;
    let invalid = |e: chanspoof::Error| CliError::Invalid(format!("{}: {e}", path.display()));
    let channel = ChannelFile::from_json(&text).and_then(|f| f.to_channel()).map_err(invalid)?;
    let choi = channel.to_choi();
    let report = validate_cptp(&choi, cli.tol)?;
    if !report.valid {
        return Err(CliError::Invalid(format!("{}: not a channel: {report}", path.display())));
    }
    Ok((channel, choi))
}

fn kraus_of(cli: &Cli, channel: Channel, choi: &ChoiMatrix) -> Result<KrausSet> {
    Ok(match channel {
        Channel::Kraus(k) => k,
        _ => choi_to_kraus(choi, cli.tol)?,
    })
}

fn gen(cli: &Cli, files: &mut Files, dim: usize, rank: Option<usize>, repr: Repr) -> Result<()> {
    let rank = rank.unwrap_or(dim * dim);
    let k = random_channel(dim, rank, cli.seed)?;
    let file = match repr {
        Repr::Kraus => ChannelFile::from_kraus(&k),
        Repr::Choi => ChannelFile::from_choi(&kraus_to_choi(&k)),
        Repr::Superop => ChannelFile::from_superop(&kraus_to_superop(&k)),
    };
    write_output(cli, files, file.to_json()?.as_bytes())?;
    data_reporter(cli).say(format!("generated d={dim} rank={rank} seed={}", cli.seed));
    Ok(())
}

fn minimize(cli: &Cli, files: &mut Files, input: &Path, cfg: &MinimizerConfig) -> Result<()> {
    cfg.validate()?;
    let (_, j) = load(cli, files, input)?;
    let outcome = sinkhorn_minimize(&j, cfg)?;
    write_output(cli, files, ChannelFile::from_choi(&outcome.choi).to_json()?.as_bytes())?;
    if let Some(path) = &cli.trace {
        let mut log = Vec::new();
        write_convergence_log(&mut log, &outcome.trace, j.dim(), cfg.mode)?;
        write_atomic(path, &log)?;
        files.outputs.push(path.clone());
    }
    let report = same_class(&j, &outcome.choi, cli.tol)?;
    let r = data_reporter(cli);
    r.say(format!(
        "rank {} -> {} (lower bound {})",
        kraus_rank(&j, cfg.epsilon)?,
        kraus_rank(&outcome.choi, cfg.epsilon)?,
        rank_lower_bound(&j, cfg.epsilon)?
    ));
    r.say(format!(
        "iterations {} converged {} residual {:e} mode {}",
        outcome.trace.iterations, outcome.converged, report.max_block_deviation, cfg.mode
    ));
    if outcome.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

fn verify(cli: &Cli, files: &mut Files, a: &Path, b: &Path) -> Result<()> {
    let (_, ja) = load(cli, files, a)?;
    let (_, jb) = load(cli, files, b)?;
    let report = same_class(&ja, &jb, cli.tol)?;
    if cli.out.is_some() {
        let text = serde_json::to_string_pretty(&report).map_err(chanspoof::Error::from)? + "\n";
        write_output(cli, files, text.as_bytes())?;
    }
    text_reporter(cli).say(report.to_string());
    if report.same_class {
        Ok(())
    } else {
        Err(CliError::NotSameClass)
    }
}

fn pauli_source(cli: &Cli, source: &PauliSource) -> Result<PauliChannel> {
    Ok(match source.qubits {
        Some(n) => PauliChannel::random(n, cli.seed)?,
        None => PauliChannel::new(source.alphas.clone())?,
    })
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct SpoofOutput<'a> {
    transform: &'a str,
    beta: f64,
    gamma: f64,
    input: &'a [f64],
    alphas: [f64; 4],
}

fn pauli(cli: &Cli, files: &mut Files, action: &PauliAction) -> Result<()> {
    match action {
        PauliAction::Reduce { source } => {
            let p = pauli_source(cli, source)?;
            let reduced = analytic_reduce(&p);
            if cli.out.is_some() {
                write_output(cli, files, ChannelFile::from_kraus(&reduced.kraus()).to_json()?.as_bytes())?;
            }
            let r = text_reporter(cli);
            r.say(format!("rank {} -> {}", kraus_rank(&p.choi(), cli.tol)?, kraus_rank(&reduced.choi(), cli.tol)?));
            r.say(format!("alphas {}", join(reduced.alphas())));
        }
        PauliAction::Tetra { source, resolution } => {
            let p = pauli_source(cli, source)?;
            let points = tetrahedron_data(p.alphas(), *resolution)?;
            let mut csv = Vec::new();
            write_plot_dataset(&mut csv, &points)?;
            write_output(cli, files, &csv)?;
            data_reporter(cli).say(format!("{} points", points.len()));
        }
        PauliAction::Spoof { source, kind, beta, gamma } => {
            let p = pauli_source(cli, source)?;
            let alphas = match kind.as_str() {
                "1" if *gamma != 0.0 => return Err(CliError::Usage("--gamma applies to --type 2 only".into())),
                "1" => pauli_type1(p.alphas(), *beta)?,
                _ => pauli_type2(p.alphas(), *beta, *gamma)?,
            };
            if cli.out.is_some() {
                let out = SpoofOutput { transform: kind, beta: *beta, gamma: *gamma, input: p.alphas(), alphas };
                let text = serde_json::to_string_pretty(&out).map_err(chanspoof::Error::from)? + "\n";
                write_output(cli, files, text.as_bytes())?;
            }
            text_reporter(cli).say(join(&alphas));
        }
    }
    Ok(())
}

fn detect(cli: &Cli, files: &mut Files, a: &Path, b: &Path, shots: u64, bases: usize, states: usize) -> Result<()> {
    let (ca, ja) = load(cli, files, a)?;
    let (cb, jb) = load(cli, files, b)?;
    if ja.dim() != jb.dim() {
        return Err(chanspoof::Error::DimensionMismatch { expected: ja.dim(), found: jb.dim() }.into());
    }
    let ka = kraus_of(cli, ca, &ja)?;
    let kb = kraus_of(cli, cb, &jb)?;
    let fixed_basis = fixed_basis_test(&ka, &kb, states, shots, derive_seed(cli.seed, 0))?;
    let random_basis = random_basis_detect(&ka, &kb, bases, shots, derive_seed(cli.seed, 1))?;
    let r = data_reporter(cli);
    for (name, res) in [("fixed basis", &fixed_basis), ("random bases", &random_basis)] {
        r.say(format!(
            "{name}: statistic {:.4e} threshold {:.4e} detected {}",
            res.statistic, res.threshold, res.detected
        ));
    }
    let report = DetectionReport { dim: ja.dim(), seed: cli.seed, shots, bases, states, fixed_basis, random_basis };
    write_output(cli, files, report.to_json()?.as_bytes())
}

fn count(
    cli: &Cli,
    files: &mut Files,
    kind: FamilyKind,
    dim: Option<usize>,
    qubits: Option<usize>,
    numeric: bool,
) -> Result<()> {
    let mode = effective_mode(cli).unwrap_or_default();
    let size = match (kind.is_pauli(), dim, qubits) {
        (true, _, Some(n)) => n,
        (true, _, None) => return Err(CliError::Usage(format!("{} takes --qubits", kind.as_str()))),
        (false, Some(d), _) => d,
        (false, None, Some(n)) => 1usize
            .checked_shl(n as u32)
            .filter(|_| n < usize::BITS as usize)
            .ok_or_else(|| CliError::Usage(format!("{n} qubits is too many")))?,
        (false, None, None) => return Err(CliError::Usage(format!("{} takes --dim or --qubits", kind.as_str()))),
    };
    let mut text = format!("{}\n", count_free_params(kind, size, mode)?);
    if numeric {
        let value = match kind {
            FamilyKind::TypeI => numeric_type1_dimension(&generic_choi(size, cli.seed)?, cli.tol)?,
            FamilyKind::TypeII => numeric_class_dimension(&generic_choi(size, cli.seed)?, mode, cli.tol)?,
            FamilyKind::TypeIPauli => type1_pauli_dimension(&PauliChannel::random(size, cli.seed)?, cli.tol)?,
            FamilyKind::TypeIIPauli => type2_pauli_dimension(size, cli.tol)?,
        };
        text.push_str(&format!("numeric {value}\n"));
    }
    if cli.out.is_some() {
        write_output(cli, files, text.as_bytes())?;
    }
    if !cli.quiet || cli.out.is_none() {
        print!("{text}");
    }
    Ok(())
}

fn generic_choi(d: usize, seed: u64) -> Result<ChoiMatrix> {
    Ok(kraus_to_choi(&random_channel(d, d * d, seed)?))
}
