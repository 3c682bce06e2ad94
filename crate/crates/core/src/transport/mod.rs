//! Classical discrete optimal transport.
//!
//! [`sinkhorn_solve`] is the entropic matrix-scaling solver, [`exact_solve`]
//! the transportation-simplex oracle, and [`wasserstein_distance`] ties either
//! one to a zero-shift cost matrix.

mod cost;
mod exact;
mod sinkhorn;

pub(crate) use cost::check_exponent;
pub use cost::{build_cost_matrix, CostMatrix};
pub use exact::{exact_solve, EXACT_SIZE_LIMIT};
pub use sinkhorn::{sinkhorn_solve, SinkhornConfig};

use crate::distribution::DiscreteDistribution;
use crate::error::Result;
use crate::scalar::Scalar;

/// A transport plan together with its squared marginal residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    rows: usize,
    cols: usize,
    plan: Vec<T>,
    /// `‖P 1 − a‖₂²`
    pub row_marginal_residual: T,
    /// `‖Pᵀ 1 − b‖₂²`
    pub col_marginal_residual: T,
}

impl<T: Scalar> Coupling<T> {
    pub(crate) fn new(rows: usize, cols: usize, plan: Vec<T>, a: &[T], b: &[T]) -> Self {
        let (row_marginal_residual, col_marginal_residual) = marginal_residuals(rows, cols, &plan, a, b);
        Self { rows, cols, plan, row_marginal_residual, col_marginal_residual }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.plan[i * self.cols + j]
    }

    pub fn plan(&self) -> &[T] {
        &self.plan
    }

    pub fn residual(&self) -> T {
        self.row_marginal_residual + self.col_marginal_residual
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.plan.chunks_exact(self.cols).map(|r| r.iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for r in self.plan.chunks_exact(self.cols) {
            for (o, &x) in out.iter_mut().zip(r) {
                *o = *o + x;
            }
        }
        out
    }
}

pub(crate) fn marginal_residuals<T: Scalar>(rows: usize, cols: usize, plan: &[T], a: &[T], b: &[T]) -> (T, T) {
    let mut col = vec![T::zero(); cols];
    let mut row_res = T::zero();
    for i in 0..rows {
        let r = &plan[i * cols..(i + 1) * cols];
        let mut s = T::zero();
        for (j, &x) in r.iter().enumerate() {
            s = s + x;
            col[j] = col[j] + x;
        }
        let d = s - a[i];
        row_res = row_res + d * d;
    }
    let col_res = col.iter().zip(b).map(|(&c, &bj)| (c - bj) * (c - bj)).sum();
    (row_res, col_res)
}

/// Outcome of a single transport solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    /// `Σ P_ij C_ij`, without any entropy term.
    pub transport_cost: T,
    pub coupling: Coupling<T>,
    pub iterations: usize,
    pub converged: bool,
    /// `log g(K) = −Σ C_ij / λ` for entropic solves; `None` for the exact oracle.
    pub log_kernel_stability: Option<T>,
    pub shift_used: Vec<T>,
}

/// Which inner solver to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver<T> {
    Entropic(SinkhornConfig<T>),
    Exact,
}

impl<T: Scalar> Solver<T> {
    pub fn solve(&self, cost: &CostMatrix<T>, a: &[T], b: &[T]) -> Result<SolveReport<T>> {
        match self {
            Solver::Entropic(cfg) => sinkhorn_solve(cost, a, b, cfg),
            Solver::Exact => exact_solve(cost, a, b),
        }
    }
}

/// `W_p(μ, ν) = OT(μ, ν, p)^{1/p}` on the unshifted cost matrix.
pub fn wasserstein_distance<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    p: T,
    solver: &Solver<T>,
) -> Result<T> {
    Ok(wasserstein_report(src, dst, p, solver)?.transport_cost.max(T::zero()).powf(p.recip()))
}

/// Like [`wasserstein_distance`] but returns the full solver report.
pub fn wasserstein_report<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    p: T,
    solver: &Solver<T>,
) -> Result<SolveReport<T>> {
    let cost = build_cost_matrix(src, dst, p, &[])?;
    solver.solve(&cost, src.masses(), dst.masses())
}
