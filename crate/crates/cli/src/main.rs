//! `rwot` command-line tool.
//!
//! Exit codes: 0 on success, 1 on bad input or usage, 2 when a solver did
//! not converge or failed numerically (any computed value is still printed).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwot::OtError;

#[derive(Parser, Debug)]
#[command(name = "rwot", version, about = "Relative-translation invariant Wasserstein distances")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Entropic regularization λ.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub lambda: f64,

    /// Sinkhorn stopping threshold on the squared marginal residual.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub epsilon: f64,

    #[arg(long = "max-iter", global = true, default_value_t = 100_000)]
    pub max_iter: usize,

    /// Output file. JSON commands also print to stdout; CSV commands get a
    /// `<out>.meta.json` sidecar.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance between two point-cloud CSV files.
    Dist(DistArgs),
    /// Benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Classification experiments.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Similarity search.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Kernel stability at zero, mean and random shifts.
    Diag(DiagArgs),
}

#[derive(Subcommand, Debug)]
pub enum BenchCommand {
    /// Classic against RW₂ Sinkhorn on translated sample pairs.
    ShiftSweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum ClassifyCommand {
    /// k-nearest-neighbour accuracy on randomly translated images.
    Knn(KnnArgs),
}

#[derive(Subcommand, Debug)]
pub enum SearchCommand {
    /// The k corpus items closest to a query.
    Topk(TopkArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistMetric {
    Wp,
    Rwp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Sinkhorn,
    Exact,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    pub src: PathBuf,
    pub dst: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = DistMetric::Wp)]
    pub metric: DistMetric,
    #[arg(long, value_enum, default_value_t = SolverKind::Sinkhorn)]
    pub solver: SolverKind,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Gaussian,
    Uniform,
    Poisson,
    Geometric,
    Gamma,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Gaussian)]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Sample count per distribution.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])]
    pub lengths: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Gaussian standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Uniform lower bound.
    #[arg(long, default_value_t = 0.0)]
    pub low: f64,
    /// Uniform upper bound.
    #[arg(long, default_value_t = 1.0)]
    pub high: f64,
    /// Poisson or gamma rate.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Geometric success probability.
    #[arg(long, default_value_t = 0.5)]
    pub prob: f64,
    /// Gamma shape.
    #[arg(long, default_value_t = 2.0)]
    pub shape: f64,
}

#[derive(Args, Debug)]
pub struct KnnArgs {
    /// `synthetic:N[:CLASSES]`, a `label,path` manifest, or an IDX image file
    /// (with `--labels`).
    #[arg(long)]
    pub corpus: String,
    /// IDX label file matching an IDX `--corpus`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Use only the first N images of the corpus.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 4, 8, 12, 16, 20, 24, 28])]
    pub lengths: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = ["L1".to_string(), "L2".into(), "W1".into(), "W2".into(), "RW2".into()])]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long = "test-ratio", default_value_t = 0.25)]
    pub test_ratio: f64,
    /// Side of the square canvas images are embedded in.
    #[arg(long, default_value_t = 84)]
    pub canvas: usize,
}

#[derive(Args, Debug)]
pub struct TopkArgs {
    /// Manifest of `id,path` lines (a bare path uses its file stem as id).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Grid CSV, or a frame manifest with `--sequence`.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value = "RW2")]
    pub metric: String,
    /// Corpus entries and query are frame manifests rather than single images.
    #[arg(long)]
    pub sequence: bool,
}

#[derive(Args, Debug)]
pub struct DiagArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub dst: PathBuf,
    /// Number of random shifts compared against the mean shift.
    #[arg(long, default_value_t = 20)]
    pub shifts: usize,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Numerical(anyhow::Error),
    /// Output already written; the solver stopped before converging.
    NotConverged,
}

impl From<OtError> for Failure {
    fn from(e: OtError) -> Self {
        match e {
            OtError::KernelUnderflow { .. } | OtError::NumericalError { .. } => Failure::Numerical(e.into()),
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<OtError>() {
            Ok(ot) => ot.into(),
            Err(e) => Failure::Input(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::NotConverged) => {
            eprintln!("warning: solver did not converge within the iteration limit");
            ExitCode::from(2)
        }
    }
}
