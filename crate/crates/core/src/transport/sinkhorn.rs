use serde::Serialize;

use super::{marginal_residuals, CostMatrix, Coupling, SolveReport};
use crate::diagnostics::kernel_stability;
use crate::distribution::check_mass_vector;
use crate::error::{OtError, Result};
use crate::scalar::Scalar;

/// Parameters of the entropic solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinkhornConfig<T> {
    /// Entropic regularization coefficient `λ`; the kernel is `exp(−C/λ)`.
    pub lambda: T,
    /// Stop once `‖P1 − a‖₂² + ‖Pᵀ1 − b‖₂² ≤ epsilon`.
    pub epsilon: T,
    pub max_iterations: usize,
    /// Iterations between two residual evaluations.
    pub check_interval: usize,
}

impl<T: Scalar> Default for SinkhornConfig<T> {
    fn default() -> Self {
        Self { lambda: T::lit(0.1), epsilon: T::lit(0.01), max_iterations: 100_000, check_interval: 10 }
    }
}

impl<T: Scalar> SinkhornConfig<T> {
    pub fn new(lambda: T, epsilon: T) -> Self {
        Self { lambda, epsilon, ..Self::default() }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_check_interval(mut self, check_interval: usize) -> Self {
        self.check_interval = check_interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero()) || !self.lambda.is_finite() {
            return Err(OtError::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return Err(OtError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(OtError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.check_interval == 0 {
            return Err(OtError::InvalidConfig("check_interval must be at least 1".into()));
        }
        Ok(())
    }
}

/// Entropic optimal transport by alternating diagonal scaling of `K = exp(−C/λ)`.
///
/// Starting from `u = 1, v = 1` the updates are `u ← a ./ (K v)` and
/// `v ← b ./ (Kᵀ u)`. Every `check_interval` iterations (and at the last
/// allowed one) the coupling `diag(u) K diag(v)` is tested against the
/// squared-residual threshold. A zero divisor is reported as
/// [`OtError::KernelUnderflow`]; nothing is silently moved to the log domain.
pub fn sinkhorn_solve<T: Scalar>(
    cost: &CostMatrix<T>,
    a: &[T],
    b: &[T],
    cfg: &SinkhornConfig<T>,
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let (m1, m2) = (cost.rows(), cost.cols());
    if a.len() != m1 {
        return Err(OtError::DimensionError { expected: m1, found: a.len() });
    }
    if b.len() != m2 {
        return Err(OtError::DimensionError { expected: m2, found: b.len() });
    }
    check_mass_vector(a, "source masses")?;
    check_mass_vector(b, "target masses")?;

    let inv_lambda = cfg.lambda.recip();
    let kernel: Vec<T> = cost.entries().iter().map(|&c| (-c * inv_lambda).exp()).collect();

    let mut u = vec![T::one(); m1];
    let mut v = vec![T::one(); m2];
    let mut kv = vec![T::zero(); m1];
    let mut ktu = vec![T::zero(); m2];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;

        for (i, out) in kv.iter_mut().enumerate() {
            *out = kernel[i * m2..(i + 1) * m2].iter().zip(&v).map(|(&k, &vj)| k * vj).sum();
        }
        for i in 0..m1 {
            if kv[i] == T::zero() {
                return Err(OtError::KernelUnderflow { iteration: iterations, axis: "row", index: i });
            }
            u[i] = a[i] / kv[i];
            if !u[i].is_finite() {
                return Err(OtError::NumericalError { iteration: iterations, what: "row scaling u" });
            }
        }

        ktu.iter_mut().for_each(|x| *x = T::zero());
        for (i, &ui) in u.iter().enumerate() {
            for (acc, &k) in ktu.iter_mut().zip(&kernel[i * m2..(i + 1) * m2]) {
                *acc = *acc + k * ui;
            }
        }
        for j in 0..m2 {
            if ktu[j] == T::zero() {
                return Err(OtError::KernelUnderflow { iteration: iterations, axis: "column", index: j });
            }
            v[j] = b[j] / ktu[j];
            if !v[j].is_finite() {
                return Err(OtError::NumericalError { iteration: iterations, what: "column scaling v" });
            }
        }

        if iterations % cfg.check_interval == 0 || iterations == cfg.max_iterations {
            let plan = scaled_plan(&kernel, &u, &v, m2);
            let (r, c) = marginal_residuals(m1, m2, &plan, a, b);
            let res = r + c;
            if !res.is_finite() {
                return Err(OtError::NumericalError { iteration: iterations, what: "marginal residual" });
            }
            if res <= cfg.epsilon {
                converged = true;
                break;
            }
        }
    }

    let plan = scaled_plan(&kernel, &u, &v, m2);
    if plan.iter().any(|x| !x.is_finite()) {
        return Err(OtError::NumericalError { iteration: iterations, what: "coupling" });
    }
    let transport_cost = plan.iter().zip(cost.entries()).map(|(&p, &c)| p * c).sum();
    Ok(SolveReport {
        transport_cost,
        coupling: Coupling::new(m1, m2, plan, a, b),
        iterations,
        converged,
        log_kernel_stability: Some(kernel_stability(cost, cfg.lambda)),
        shift_used: cost.shift().to_vec(),
    })
}

fn scaled_plan<T: Scalar>(kernel: &[T], u: &[T], v: &[T], m2: usize) -> Vec<T> {
    let mut plan = Vec::with_capacity(kernel.len());
    for (i, &ui) in u.iter().enumerate() {
        plan.extend(kernel[i * m2..(i + 1) * m2].iter().zip(v).map(|(&k, &vj)| ui * k * vj));
    }
    plan
}
