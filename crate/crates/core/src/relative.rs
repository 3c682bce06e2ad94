//! Relative-translation optimal transport and the `RW_p` distances.
//!
//! For the quadratic cost the outer minimization over translations has the
//! closed-form minimizer `s = ν̄ − μ̄` (mass-weighted means), the optimal
//! couplings of the translated and untranslated problems coincide, and
//! `W₂² = ‖μ̄ − ν̄‖₂² + RW₂²`. For other exponents the translation is found by
//! a multi-start derivative-free search inside the ball
//! `‖s‖_p ≤ 2 max_ij ‖x_i − y_j‖_p`, which always contains a minimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::DiscreteDistribution;
use crate::error::{OtError, Result};
use crate::scalar::{pnorm, Scalar};
use crate::search::nelder_mead;
use crate::transport::{build_cost_matrix, SinkhornConfig, SolveReport, Solver};

/// `Σ masses[i] · points[i]`.
pub fn weighted_mean<T: Scalar>(d: &DiscreteDistribution<T>) -> Vec<T> {
    let mut mean = vec![T::zero(); d.dim()];
    for (p, &w) in d.points().zip(d.masses()) {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m = *m + w * x;
        }
    }
    mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftResult<T> {
    /// `dst_mean − src_mean`
    pub shift: Vec<T>,
    pub src_mean: Vec<T>,
    pub dst_mean: Vec<T>,
}

/// The translation minimizing the quadratic ROT objective.
pub fn optimal_shift<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
) -> Result<ShiftResult<T>> {
    src.check_same_dim(dst)?;
    let src_mean = weighted_mean(src);
    let dst_mean = weighted_mean(dst);
    let shift = dst_mean.iter().zip(&src_mean).map(|(&y, &x)| y - x).collect();
    Ok(ShiftResult { shift, src_mean, dst_mean })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwReport<T> {
    pub rw_distance: T,
    /// `W₂` recovered from the Pythagorean identity; only set for `p = 2`.
    pub w_distance: Option<T>,
    /// `‖μ̄ − ν̄‖₂`
    pub mean_gap: T,
    /// The inner solve at the chosen translation.
    pub inner: SolveReport<T>,
    pub p: T,
    /// Translation applied to the source.
    pub shift: Vec<T>,
    /// Inner solves spent locating the shift (zero on the closed-form path).
    pub evaluations: usize,
    /// At least one search start ran out of evaluations before converging.
    pub budget_exhausted: bool,
}

impl<T: Scalar> RwReport<T> {
    /// `V* = −‖μ̄ − ν̄‖₂²`, the optimal value of the vertical problem.
    pub fn vertical_optimum(&self) -> T {
        -self.mean_gap * self.mean_gap
    }
}

/// `RW₂` with the entropic inner solver.
pub fn rw2_sinkhorn<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    cfg: &SinkhornConfig<T>,
) -> Result<RwReport<T>> {
    rw2(src, dst, &Solver::Entropic(*cfg))
}

/// `RW₂` with the exact inner solver.
pub fn rw2_exact<T: Scalar>(src: &DiscreteDistribution<T>, dst: &DiscreteDistribution<T>) -> Result<RwReport<T>> {
    rw2(src, dst, &Solver::Exact)
}

/// Translate by the mean gap, solve the centred quadratic problem, then recover `W₂`.
pub fn rw2<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    solver: &Solver<T>,
) -> Result<RwReport<T>> {
    let two = T::lit(2.0);
    let ShiftResult { shift, .. } = optimal_shift(src, dst)?;
    let cost = build_cost_matrix(src, dst, two, &shift)?;
    let inner = solver.solve(&cost, src.masses(), dst.masses())?;
    let rw_sq = inner.transport_cost.max(T::zero());
    let gap_sq: T = shift.iter().map(|&s| s * s).sum();
    Ok(RwReport {
        rw_distance: rw_sq.sqrt(),
        w_distance: Some((gap_sq + rw_sq).sqrt()),
        mean_gap: gap_sq.sqrt(),
        inner,
        p: two,
        shift,
        evaluations: 0,
        budget_exhausted: false,
    })
}

/// Controls the outer translation search used for `p ≠ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftSearchConfig<T> {
    /// Total number of starts, including the origin and the mean gap.
    pub starts: usize,
    /// Stop a start once the simplex values agree to within this.
    pub tolerance: T,
    /// Inner solves allowed per start.
    pub budget: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for ShiftSearchConfig<T> {
    fn default() -> Self {
        Self { starts: 10, tolerance: T::lit(1e-6), budget: 500, seed: 42 }
    }
}

/// `2 max_ij ‖x_i − y_j‖_p`, the radius of the ball that contains a minimizing shift.
pub fn shift_radius<T: Scalar>(src: &DiscreteDistribution<T>, dst: &DiscreteDistribution<T>, p: T) -> Result<T> {
    src.check_same_dim(dst)?;
    let mut r = T::zero();
    for x in src.points() {
        for y in dst.points() {
            r = r.max(pnorm(x.iter().zip(y).map(|(&a, &b)| a - b), p));
        }
    }
    Ok(T::lit(2.0) * r)
}

/// `RW_p(μ, ν) = ROT(μ, ν, p)^{1/p}`.
///
/// `p = 2` always takes the closed-form path. Otherwise a Nelder–Mead search
/// runs from the origin, from `ν̄ − μ̄`, and from seeded random points of the
/// admissible ball; candidates leaving the ball are pulled back radially.
/// Inner failures at a probe count as `+∞`; the first error is returned
/// only when every probe fails.
pub fn rw_p_distance<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    p: T,
    solver: &Solver<T>,
    search: &ShiftSearchConfig<T>,
) -> Result<RwReport<T>> {
    crate::transport::check_exponent(p)?;
    src.check_same_dim(dst)?;
    if p == T::lit(2.0) {
        return rw2(src, dst, solver);
    }
    if search.starts == 0 || search.budget == 0 {
        return Err(OtError::InvalidConfig("shift search needs at least one start and one evaluation".into()));
    }

    let radius = shift_radius(src, dst, p)?;
    let gap = optimal_shift(src, dst)?;
    let starts = search_starts(&gap.shift, radius, p, search);

    let objective = |s: &[T]| -> T {
        build_cost_matrix(src, dst, p, s)
            .and_then(|c| solver.solve(&c, src.masses(), dst.masses()))
            .map(|r| r.transport_cost)
            .unwrap_or(T::infinity())
    };
    let project = |s: &mut Vec<T>| {
        let norm = pnorm(s.iter().copied(), p);
        if norm > radius && norm > T::zero() {
            let k = radius / norm;
            s.iter_mut().for_each(|x| *x = *x * k);
        }
    };
    let step = if radius > T::zero() { radius * T::lit(0.05) } else { T::lit(1e-3) };

    let runs: Vec<_> = starts
        .par_iter()
        .map(|s0| nelder_mead(objective, project, s0, step, search.tolerance, search.budget))
        .collect();

    // fixed-order reduction keeps the result independent of scheduling
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.value < best.value {
            best = run;
        }
    }
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let budget_exhausted = runs.iter().any(|r| !r.converged);

    let cost = build_cost_matrix(src, dst, p, &best.point)?;
    let inner = solver.solve(&cost, src.masses(), dst.masses())?;
    let value = inner.transport_cost.max(T::zero());
    Ok(RwReport {
        rw_distance: value.powf(p.recip()),
        w_distance: None,
        mean_gap: pnorm(gap.shift.iter().copied(), T::lit(2.0)),
        inner,
        p,
        shift: best.point.clone(),
        evaluations,
        budget_exhausted,
    })
}

fn search_starts<T: Scalar>(gap: &[T], radius: T, p: T, search: &ShiftSearchConfig<T>) -> Vec<Vec<T>> {
    let n = gap.len();
    let mut starts = vec![vec![T::zero(); n]];
    if search.starts > 1 {
        starts.push(gap.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    while starts.len() < search.starts {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let dir: Vec<T> = dir.into_iter().map(T::lit).collect();
        let norm = pnorm(dir.iter().copied(), p);
        let u: f64 = rng.random();
        let r = radius * T::lit(u.powf(1.0 / n as f64));
        if norm > T::zero() {
            starts.push(dir.into_iter().map(|d| d / norm * r).collect());
        }
    }
    starts
}
