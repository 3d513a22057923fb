use std::path::PathBuf;
use std::process::ExitCode;

use chanspoof::spoofing::{FamilyKind, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod error;
mod output;

/// Spoofing classes of quantum channels under fixed-basis measurement.
///
/// Exit status: 0 success, 2 usage or invalid parameter, 3 invalid input or
/// channels not in the same class, 4 minimization did not converge, 5 I/O
/// error.
#[derive(Debug, Parser)]
#[command(name = "chanspoof", version)]
pub struct Cli {
    /// Numerical tolerance for validation and class membership.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file; a run manifest is written next to it. Defaults to
    /// standard output for commands that produce a data file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Convergence log path (minimize only).
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,

    /// Class convention: `operational` or `paper-strict`. Defaults to
    /// operational for minimize and paper-strict for count.
    #[arg(long, global = true)]
    pub mode: Option<Mode>,

    /// Suppress summaries.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Kraus,
    Choi,
    Superop,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Random channel with the given Kraus rank.
    Gen {
        #[arg(long)]
        dim: usize,
        /// Defaults to dim^2.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, value_enum, default_value_t = Repr::Kraus)]
        repr: Repr,
    },
    /// Minimal-Kraus-rank member of a channel's class.
    Minimize {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Scale of a random initial perturbation of the off-diagonal blocks.
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
    },
    /// Checks whether two channels are in the same class.
    Verify { a: PathBuf, b: PathBuf },
    /// Pauli channel tools.
    Pauli {
        #[command(subcommand)]
        action: PauliAction,
    },
    /// Shot-based detection in the computational basis and in random bases.
    Detect {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 50)]
        bases: usize,
        /// Random input states of the fixed-basis test.
        #[arg(long, default_value_t = 10)]
        states: usize,
    },
    /// Number of free real parameters of a family.
    Count {
        /// type1, type2, type1-pauli or type2-pauli.
        kind: FamilyKind,
        #[arg(long, conflicts_with = "qubits")]
        dim: Option<usize>,
        #[arg(long)]
        qubits: Option<usize>,
        /// Also print a numerically computed value.
        #[arg(long)]
        numeric: bool,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PauliAction {
    /// Analytic minimal-rank member.
    Reduce {
        #[command(flatten)]
        source: PauliSource,
    },
    /// Plot dataset of the one-qubit simplex picture.
    Tetra {
        #[command(flatten)]
        source: PauliSource,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
    },
    /// One-qubit Type-I or Type-II transform.
    Spoof {
        #[command(flatten)]
        source: PauliSource,
        #[arg(long = "type", value_parser = ["1", "2"])]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma: f64,
    },
}

/// Coefficients given explicitly or drawn from `--seed`.
#[derive(Debug, Args, Serialize)]
pub struct PauliSource {
    /// Comma-separated coefficients in I, X, Y, Z order.
    #[arg(long, value_delimiter = ',', required_unless_present = "qubits", conflicts_with = "qubits")]
    pub alphas: Vec<f64>,
    /// Draw 4^N random coefficients.
    #[arg(long)]
    pub qubits: Option<usize>,
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chanspoof: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
