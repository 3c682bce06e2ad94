use std::time::Instant;

use serde::Serialize;

use crate::datasets::{derive_seed, sample_distribution, SamplerSpec};
use crate::error::{OtError, Result};
use crate::relative::rw2_sinkhorn;
use crate::transport::{build_cost_matrix, exact_solve, sinkhorn_solve, SinkhornConfig, EXACT_SIZE_LIMIT};
use crate::Distribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    ClassicSinkhorn,
    Rw2Sinkhorn,
}

/// One `(length, method, trial)` cell of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub shift_length: f64,
    pub method: SweepMethod,
    /// `|W₂ estimate − reference W₂|`; `+∞` when the solve failed.
    pub w2_error: f64,
    pub runtime_seconds: f64,
    pub trial: usize,
    pub seed: u64,
    pub w2_estimate: f64,
    pub w2_reference: f64,
    pub iterations: usize,
    pub converged: bool,
    pub failed: bool,
    pub lambda: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub check_interval: usize,
}

struct Estimate {
    w2: f64,
    iterations: usize,
    converged: bool,
    seconds: f64,
    failed: bool,
}

/// Classic Sinkhorn against RW₂ Sinkhorn on translated sample pairs.
///
/// For each trial, `μ` and `ν` are drawn from `spec` with seeds derived from
/// `(spec.seed, trial)`; `μ` is moved by `length · e₁` for every length. The
/// reference `W₂` is the exact oracle when `m₁ m₂` fits it, otherwise the
/// Pythagorean value from an RW₂ Sinkhorn run with `λ/10` and `ε/100`.
/// Cells run sequentially so the recorded runtimes do not contend.
pub fn shift_sweep(
    spec: &SamplerSpec,
    lengths: &[f64],
    trials: usize,
    cfg: &SinkhornConfig<f64>,
) -> Result<Vec<SweepResult>> {
    cfg.validate()?;
    spec.validate()?;
    if trials == 0 {
        return Err(OtError::InvalidExperiment("trials must be at least 1".into()));
    }
    if lengths.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(OtError::InvalidExperiment("shift lengths must be finite and nonnegative".into()));
    }
    let tight = SinkhornConfig { lambda: cfg.lambda / 10.0, epsilon: cfg.epsilon / 100.0, ..*cfg };

    let mut pairs = Vec::with_capacity(trials);
    for trial in 0..trials {
        let seed = derive_seed(spec.seed, &[trial as u64]);
        let mu = sample_distribution(&spec.with_seed(derive_seed(seed, &[0])))?;
        let nu = sample_distribution(&spec.with_seed(derive_seed(seed, &[1])))?;
        let use_exact = mu.len() * nu.len() <= EXACT_SIZE_LIMIT;
        // the centred problem does not depend on the translation, so the
        // tightened RW₂ reference is computed once per trial
        let rw_ref = if use_exact { None } else { Some(rw2_sinkhorn(&mu, &nu, &tight)?.rw_distance) };
        pairs.push((seed, mu, nu, rw_ref));
    }

    let mut rows = Vec::with_capacity(lengths.len() * 2 * trials);
    for &length in lengths {
        let mut cells = Vec::with_capacity(2 * trials);
        for (trial, (seed, mu, nu, rw_ref)) in pairs.iter().enumerate() {
            let mut t = vec![0.0; mu.dim()];
            t[0] = length;
            let moved = mu.translate(&t)?;
            let reference = match rw_ref {
                Some(rw) => {
                    let gap = crate::relative::optimal_shift(&moved, nu)?.shift;
                    (gap.iter().map(|g| g * g).sum::<f64>() + rw * rw).sqrt()
                }
                None => {
                    let cost = build_cost_matrix(&moved, nu, 2.0, &[])?;
                    exact_solve(&cost, moved.masses(), nu.masses())?.transport_cost.max(0.0).sqrt()
                }
            };
            let classic = run_classic(&moved, nu, cfg);
            let relative = run_rw2(&moved, nu, cfg);
            for (method, est) in [(SweepMethod::ClassicSinkhorn, classic), (SweepMethod::Rw2Sinkhorn, relative)] {
                cells.push((method, trial, *seed, reference, est));
            }
        }
        // (length, method, trial) order
        cells.sort_by_key(|(m, trial, ..)| (*m as u8, *trial));
        rows.extend(cells.into_iter().map(|(method, trial, seed, reference, est)| SweepResult {
            shift_length: length,
            method,
            w2_error: if est.failed { f64::INFINITY } else { (est.w2 - reference).abs() },
            runtime_seconds: est.seconds,
            trial,
            seed,
            w2_estimate: est.w2,
            w2_reference: reference,
            iterations: est.iterations,
            converged: est.converged,
            failed: est.failed,
            lambda: cfg.lambda,
            epsilon: cfg.epsilon,
            max_iterations: cfg.max_iterations,
            check_interval: cfg.check_interval,
        }));
    }
    Ok(rows)
}

fn run_classic(mu: &Distribution, nu: &Distribution, cfg: &SinkhornConfig<f64>) -> Estimate {
    let start = Instant::now();
    let out = build_cost_matrix(mu, nu, 2.0, &[]).and_then(|c| sinkhorn_solve(&c, mu.masses(), nu.masses(), cfg));
    let seconds = start.elapsed().as_secs_f64();
    match out {
        Ok(r) => Estimate {
            w2: r.transport_cost.max(0.0).sqrt(),
            iterations: r.iterations,
            converged: r.converged,
            seconds,
            failed: false,
        },
        Err(_) => Estimate { w2: f64::NAN, iterations: 0, converged: false, seconds, failed: true },
    }
}

fn run_rw2(mu: &Distribution, nu: &Distribution, cfg: &SinkhornConfig<f64>) -> Estimate {
    let start = Instant::now();
    let out = rw2_sinkhorn(mu, nu, cfg);
    let seconds = start.elapsed().as_secs_f64();
    match out {
        Ok(r) => Estimate {
            w2: r.w_distance.unwrap_or(f64::NAN),
            iterations: r.inner.iterations,
            converged: r.inner.converged,
            seconds,
            failed: false,
        },
        Err(_) => Estimate { w2: f64::NAN, iterations: 0, converged: false, seconds, failed: true },
    }
}
