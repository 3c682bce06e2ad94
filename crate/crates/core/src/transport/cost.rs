use crate::distribution::DiscreteDistribution;
use crate::error::{OtError, Result};
use crate::scalar::{pnorm_pow, Scalar};

/// Pairwise `‖x_i + shift − y_j‖_p^p` costs between two supports.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
    exponent_p: T,
    shift: Vec<T>,
}

impl<T: Scalar> CostMatrix<T> {
    /// Wraps a precomputed row-major matrix. The shift is recorded as given.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<T>, exponent_p: T, shift: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(OtError::InvalidConfig(format!(
                "cost buffer of length {} is not {rows}x{cols}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|c| !c.is_finite() || **c < T::zero()) {
            return Err(OtError::InvalidConfig(format!("invalid cost entry {bad}")));
        }
        check_exponent(exponent_p)?;
        Ok(Self { rows, cols, entries, exponent_p, shift })
    }

    /// Convenience constructor from nested rows with `p = 2` and no shift.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(OtError::InvalidConfig("ragged cost rows".into()));
        }
        Self::from_entries(r, c, rows.concat(), T::lit(2.0), Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn exponent_p(&self) -> T {
        self.exponent_p
    }

    pub fn shift(&self) -> &[T] {
        &self.shift
    }

    /// `‖C‖_∞ = max_ij C_ij`.
    pub fn inf_norm(&self) -> T {
        self.entries.iter().copied().fold(T::zero(), T::max)
    }

    pub fn total(&self) -> T {
        self.entries.iter().copied().sum()
    }

    /// Largest absolute deviation from a fresh recomputation on `src`/`dst`.
    pub fn recomputation_error(&self, src: &DiscreteDistribution<T>, dst: &DiscreteDistribution<T>) -> Result<T> {
        let fresh = build_cost_matrix(src, dst, self.exponent_p, &self.shift)?;
        Ok(self.entries.iter().zip(&fresh.entries).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max))
    }
}

pub(crate) fn check_exponent<T: Scalar>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(OtError::InvalidExponent(p.as_f64()));
    }
    Ok(())
}

/// Builds `C_ij = ‖src_i + shift − dst_j‖_p^p`.
///
/// An empty `shift` is treated as the zero vector.
pub fn build_cost_matrix<T: Scalar>(
    src: &DiscreteDistribution<T>,
    dst: &DiscreteDistribution<T>,
    p: T,
    shift: &[T],
) -> Result<CostMatrix<T>> {
    src.check_same_dim(dst)?;
    check_exponent(p)?;
    let n = src.dim();
    let shift = if shift.is_empty() {
        vec![T::zero(); n]
    } else if shift.len() != n {
        return Err(OtError::DimensionError { expected: n, found: shift.len() });
    } else {
        shift.to_vec()
    };

    let mut moved = vec![T::zero(); n];
    let mut entries = Vec::with_capacity(src.len() * dst.len());
    for x in src.points() {
        for (k, m) in moved.iter_mut().enumerate() {
            *m = x[k] + shift[k];
        }
        for y in dst.points() {
            entries.push(pnorm_pow(moved.iter().zip(y).map(|(&a, &b)| a - b), p));
        }
    }
    Ok(CostMatrix { rows: src.len(), cols: dst.len(), entries, exponent_p: p, shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(points: Vec<Vec<f64>>) -> DiscreteDistribution<f64> {
        DiscreteDistribution::uniform(points).unwrap()
    }

    #[test]
    fn single_pair_squared_euclidean() {
        let c = build_cost_matrix(&d(vec![vec![0.0, 0.0]]), &d(vec![vec![3.0, 4.0]]), 2.0, &[0.0, 0.0]).unwrap();
        assert_eq!(c.entries(), &[25.0]);
    }

    #[test]
    fn shift_cancels_displacement() {
        let c = build_cost_matrix(&d(vec![vec![0.0, 0.0]]), &d(vec![vec![3.0, 4.0]]), 2.0, &[3.0, 4.0]).unwrap();
        assert_eq!(c.entries(), &[0.0]);
        assert_eq!(c.shift(), &[3.0, 4.0]);
    }

    #[test]
    fn line_pair() {
        let c = build_cost_matrix(&d(vec![vec![0.0], vec![1.0]]), &d(vec![vec![0.0], vec![2.0]]), 2.0, &[]).unwrap();
        assert_eq!(c.entries(), &[0.0, 4.0, 1.0, 1.0]);
        assert_eq!(c.inf_norm(), 4.0);
        assert_eq!(c.total(), 6.0);
    }

    #[test]
    fn errors() {
        let a = d(vec![vec![0.0]]);
        let b = d(vec![vec![0.0, 1.0]]);
        assert!(matches!(build_cost_matrix(&a, &b, 2.0, &[]), Err(OtError::DimensionError { .. })));
        assert!(matches!(build_cost_matrix(&a, &a, 0.5, &[]), Err(OtError::InvalidExponent(_))));
        assert!(matches!(build_cost_matrix(&a, &a, 2.0, &[1.0, 2.0]), Err(OtError::DimensionError { .. })));
    }

    #[test]
    fn general_exponent() {
        let c = build_cost_matrix(&d(vec![vec![0.0, 0.0]]), &d(vec![vec![1.0, 2.0]]), 3.0, &[]).unwrap();
        assert!((c.get(0, 0) - 9.0).abs() < 1e-12);
    }
}
