use thiserror::Error;

/// Errors produced by the transport solvers, samplers and loaders.
#[derive(Debug, Error)]
pub enum OtError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionError { expected: usize, found: usize },

    #[error("cost exponent p must be >= 1 and finite, got {0}")]
    InvalidExponent(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// A row of `K v` or a column of `Kᵀ u` became exactly zero.
    #[error("kernel underflow at iteration {iteration}: {axis} {index} has zero scaling divisor (translate the inputs or raise lambda)")]
    KernelUnderflow { iteration: usize, axis: &'static str, index: usize },

    #[error("non-finite value during iteration {iteration}: {what}")]
    NumericalError { iteration: usize, what: &'static str },

    #[error("marginal masses differ: source sums to {source_sum}, target sums to {target_sum}")]
    InfeasibleMarginals { source_sum: f64, target_sum: f64 },

    #[error("exact solver limited to m1*m2 <= {limit}, got {m1}x{m2}")]
    InstanceTooLarge { m1: usize, m2: usize, limit: usize },

    #[error("invalid sampler spec: {0}")]
    InvalidSamplerSpec(String),

    #[error("image has no positive intensity")]
    EmptyImage,

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("placement outside canvas: {0}")]
    PlacementError(String),

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid experiment setup: {0}")]
    InvalidExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = OtError> = std::result::Result<T, E>;
