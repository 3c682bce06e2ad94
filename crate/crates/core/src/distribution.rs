use crate::error::{OtError, Result};
use crate::scalar::Scalar;

/// A finitely supported probability measure on `ℝⁿ`.
///
/// Points are stored row-major in one buffer. Zero-mass points are dropped at
/// construction and the remaining masses are divided by their exact sum, so
/// every stored mass is strictly positive and the total is one up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    dim: usize,
    coords: Vec<T>,
    masses: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    /// Builds a distribution from points and (unnormalized) nonnegative masses.
    pub fn new(points: Vec<Vec<T>>, masses: Vec<T>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(OtError::InvalidDistribution(format!("{} points but {} masses", points.len(), masses.len())));
        }
        let dim = points.first().map(Vec::len).unwrap_or(0);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(OtError::DimensionError { expected: dim, found: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, masses)
    }

    /// Builds a distribution from a row-major coordinate buffer of `masses.len()` points.
    pub fn from_flat(dim: usize, coords: Vec<T>, masses: Vec<T>) -> Result<Self> {
        if masses.is_empty() {
            return Err(OtError::InvalidDistribution("no support points".into()));
        }
        if dim == 0 {
            return Err(OtError::InvalidDistribution("zero-dimensional points".into()));
        }
        if coords.len() != dim * masses.len() {
            return Err(OtError::InvalidDistribution(format!(
                "coordinate buffer of length {} does not hold {} points of dimension {}",
                coords.len(),
                masses.len(),
                dim
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(OtError::InvalidDistribution(format!("non-finite coordinate {bad}")));
        }
        if let Some(bad) = masses.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(OtError::InvalidDistribution(format!("invalid mass {bad}")));
        }

        let keep: Vec<usize> = (0..masses.len()).filter(|&i| masses[i] > T::zero()).collect();
        if keep.is_empty() {
            return Err(OtError::InvalidDistribution("all masses are zero".into()));
        }
        let total: T = keep.iter().map(|&i| masses[i]).sum();
        let (coords, masses) = if keep.len() == masses.len() {
            (coords, masses.into_iter().map(|w| w / total).collect())
        } else {
            let mut kept_coords = Vec::with_capacity(keep.len() * dim);
            let mut kept_masses = Vec::with_capacity(keep.len());
            for &i in &keep {
                kept_coords.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
                kept_masses.push(masses[i] / total);
            }
            (kept_coords, kept_masses)
        };
        Ok(Self { dim, coords, masses })
    }

    /// Equal mass on every point.
    pub fn uniform(points: Vec<Vec<T>>) -> Result<Self> {
        let m = points.len();
        Self::new(points, vec![T::one(); m])
    }

    pub fn dirac(point: Vec<T>) -> Result<Self> {
        Self::new(vec![point], vec![T::one()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    /// Shifts every support point by `t`; masses are unchanged.
    pub fn translate(&self, t: &[T]) -> Result<Self> {
        if t.len() != self.dim {
            return Err(OtError::DimensionError { expected: self.dim, found: t.len() });
        }
        let coords = self.coords.chunks_exact(self.dim).flat_map(|p| p.iter().zip(t).map(|(&x, &dx)| x + dx)).collect();
        Ok(Self { dim: self.dim, coords, masses: self.masses.clone() })
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(OtError::DimensionError { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

/// Validates a raw mass vector for a solver: finite, nonnegative, summing to one.
pub(crate) fn check_mass_vector<T: Scalar>(w: &[T], name: &str) -> Result<T> {
    if w.is_empty() {
        return Err(OtError::InvalidDistribution(format!("{name} is empty")));
    }
    if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < T::zero()) {
        return Err(OtError::InvalidDistribution(format!("{name} has invalid entry {bad}")));
    }
    let total: T = w.iter().copied().sum();
    if total <= T::zero() {
        return Err(OtError::InvalidDistribution(format!("{name} has zero total mass")));
    }
    Ok(total)
}
