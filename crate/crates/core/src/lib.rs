//! Relative-translation invariant Wasserstein distances.
//!
//! The crate computes classical discrete optimal transport (entropic Sinkhorn
//! and an exact transportation-simplex oracle), the translation-minimized
//! `RW_p` distances, and the RW₂ Sinkhorn variant that solves the centred
//! problem and recovers `W₂` through `W₂² = ‖μ̄ − ν̄‖₂² + RW₂²`.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the harnesses and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datasets;
pub mod diagnostics;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod relative;
pub mod scalar;
pub mod search;
pub mod transport;

pub use distribution::DiscreteDistribution;
pub use error::{OtError, Result};
pub use relative::{
    optimal_shift, rw2, rw2_exact, rw2_sinkhorn, rw_p_distance, weighted_mean, RwReport, ShiftResult, ShiftSearchConfig,
};
pub use scalar::Scalar;
pub use transport::{
    build_cost_matrix, exact_solve, sinkhorn_solve, wasserstein_distance, wasserstein_report, CostMatrix, Coupling,
    SinkhornConfig, SolveReport, Solver,
};

pub type Distribution = DiscreteDistribution<f64>;
pub type Cost = CostMatrix<f64>;
pub type Report = SolveReport<f64>;
pub type Plan = Coupling<f64>;
pub type Config = SinkhornConfig<f64>;
pub type RwResult = RwReport<f64>;

pub type Distribution32 = DiscreteDistribution<f32>;
pub type Config32 = SinkhornConfig<f32>;

/// Version string embedded in every output document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
