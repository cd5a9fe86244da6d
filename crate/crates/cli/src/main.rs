mod commands;
mod input;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unext::Error;

/// Unextendible entanglement of quantum channels.
#[derive(Parser)]
#[command(name = "unext", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// α-geometric unextendible entanglement of one channel, α = 1 + 2^-ℓ.
    Unext(UnextArgs),
    /// Closed-form values for the identity, erasure, depolarizing and semicausal erasure channels.
    Oracle(OracleArgs),
    /// k-extendibility of a bipartite state or of a channel's Choi state.
    Kext(KextArgs),
    /// Parameter sweep over a channel family, as CSV or JSON.
    Sweep(SweepArgs),
    /// Checks the superchannel conditions on a Choi operator with subsystems A, D, C, B.
    ValidateSuperchannel(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct ChannelArgs {
    /// Channel descriptor: inline JSON, a file path, or `-` for stdin.
    #[arg(long, conflicts_with = "kind")]
    channel: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<input::KindArg>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
pub struct UnextArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, default_value_t = 10)]
    ell: u32,
    /// Treat a point-to-point channel as bipartite (Alice's input to Bob's output).
    #[arg(long)]
    bipartite: bool,
    #[arg(long)]
    relax_nonsignaling: bool,
    /// Solver tolerance; defaults to UNEXT_SOLVER_TOL or 1e-8.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the conic program as JSON to this path.
    #[arg(long)]
    dump_problem: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OracleFamily {
    Identity,
    ErasureBs,
    ErasureAlpha,
    Depolarizing,
    SemicausalErasure,
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    family: OracleFamily,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Rényi order for `erasure-alpha`.
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub struct KextArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Isotropic state of fidelity F (needs --d).
    #[arg(long, conflicts_with_all = ["channel", "kind", "max_entangled", "threshold"])]
    isotropic: Option<f64>,
    /// Maximally entangled state of dimension --d.
    #[arg(long, conflicts_with_all = ["channel", "kind", "threshold"])]
    max_entangled: bool,
    /// Bisect the isotropic extendibility threshold for --d instead.
    #[arg(long, conflicts_with_all = ["channel", "kind"])]
    threshold: bool,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Figure {
    /// Erasure channel, p ∈ [0, 0.6] in 13 points.
    Erasure,
    /// Depolarizing channel, p ∈ [0, 0.5] in 26 points.
    Depolarizing,
    /// Semicausal erasure channel, p ∈ [0, 1] in 5 points.
    SemicausalErasure,
    /// Flagged erasure channel on a 5×5 (p, q) grid over [0, 1]².
    FlaggedErasure,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Preset grid.
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    figure: Option<Figure>,
    /// Sweep specification file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    ell: u32,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    relax_nonsignaling: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuperchannelExample {
    Identity,
}

#[derive(Args)]
pub struct ValidateArgs {
    /// JSON file with `dims`, `labels`, `re` and optional `im`.
    #[arg(long, required_unless_present = "example")]
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    example: Option<SuperchannelExample>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = unext::quantum::SUPERCHANNEL_TOL)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Error with the process exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SolverFailure { .. } | Error::InfeasibleModel(_) => 2,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::invalid(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Unext(a) => commands::unext(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Kext(a) => commands::kext(a),
        Command::Sweep(a) => sweep::run(a),
        Command::ValidateSuperchannel(a) => commands::validate_superchannel(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
