//! Stability and complexity instrumentation for the entropic solver.
//!
//! `g(K) = Π K_ij` underflows for all but tiny problems, so it is always
//! carried as `log g(K) = −Σ C_ij / λ`.

use serde::Serialize;

use crate::distribution::DiscreteDistribution;
use crate::error::{OtError, Result};
use crate::scalar::Scalar;
use crate::transport::{build_cost_matrix, CostMatrix};

/// `log g(K)` for the kernel `exp(−C/λ)`.
pub fn kernel_stability<T: Scalar>(cost: &CostMatrix<T>, lambda: T) -> T {
    -cost.total() / lambda
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport<T> {
    /// `log g(K)` of the quadratic cost built with `shift`.
    pub log_g: T,
    /// `‖C‖_∞` without any shift.
    pub c_inf_norm: T,
    /// `‖C‖_∞` with `shift` applied to the source.
    pub c_inf_norm_shifted: T,
    pub shift: Vec<T>,
}

/// Quadratic-cost stability figures for `src + shift` against `dst`.
pub fn stability_report<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    lambda: T,
    shift: &[T],
) -> Result<StabilityReport<T>> {
    if !(lambda > T::zero()) {
        return Err(OtError::InvalidConfig(format!("lambda must be positive, got {lambda}")));
    }
    let two = T::lit(2.0);
    let raw = build_cost_matrix(src, dst, two, &[])?;
    let shifted = build_cost_matrix(src, dst, two, shift)?;
    Ok(StabilityReport {
        log_g: kernel_stability(&shifted, lambda),
        c_inf_norm: raw.inf_norm(),
        c_inf_norm_shifted: shifted.inf_norm(),
        shift: shifted.shift().to_vec(),
    })
}

/// Unweighted centroid of a point set.
pub fn point_mean<T: Scalar>(points: &[Vec<T>]) -> Result<Vec<T>> {
    let first = points.first().ok_or_else(|| OtError::InvalidDistribution("empty point set".into()))?;
    let n = first.len();
    let mut mean = vec![T::zero(); n];
    for p in points {
        if p.len() != n {
            return Err(OtError::DimensionError { expected: n, found: p.len() });
        }
        for (m, &x) in mean.iter_mut().zip(p) {
            *m = *m + x;
        }
    }
    let count = T::from_usize_lossy(points.len());
    mean.iter_mut().for_each(|m| *m = *m / count);
    Ok(mean)
}

/// `ȳ − x̄` with unweighted support means; maximizes `g(K)` for the quadratic cost.
pub fn stability_optimal_shift<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
) -> Result<Vec<T>> {
    src.check_same_dim(dst)?;
    let xs: Vec<Vec<T>> = src.points().map(<[T]>::to_vec).collect();
    let ys: Vec<Vec<T>> = dst.points().map(<[T]>::to_vec).collect();
    let xm = point_mean(&xs)?;
    let ym = point_mean(&ys)?;
    Ok(ym.iter().zip(&xm).map(|(&y, &x)| y - x).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison<T> {
    /// `max_ij ‖X_i − Y_j‖₂`
    pub max_raw: T,
    /// `max_ij ‖X_i − X̄ − Y_j + Ȳ‖₂`
    pub max_centered: T,
    pub improved: bool,
}

/// Compares the largest pairwise distance before and after centering both samples.
pub fn shifted_norm_comparison<T: Scalar>(src_sample: &[Vec<T>], dst_sample: &[Vec<T>]) -> Result<NormComparison<T>> {
    let xm = point_mean(src_sample)?;
    let ym = point_mean(dst_sample)?;
    if xm.len() != ym.len() {
        return Err(OtError::DimensionError { expected: xm.len(), found: ym.len() });
    }
    let mut max_raw_sq = T::zero();
    let mut max_centered_sq = T::zero();
    for x in src_sample {
        for y in dst_sample {
            let mut raw = T::zero();
            let mut centered = T::zero();
            for k in 0..xm.len() {
                let d = x[k] - y[k];
                let dc = d - xm[k] + ym[k];
                raw = raw + d * d;
                centered = centered + dc * dc;
            }
            max_raw_sq = max_raw_sq.max(raw);
            max_centered_sq = max_centered_sq.max(centered);
        }
    }
    let max_raw = max_raw_sq.sqrt();
    let max_centered = max_centered_sq.sqrt();
    Ok(NormComparison { max_raw, max_centered, improved: max_centered <= max_raw })
}
