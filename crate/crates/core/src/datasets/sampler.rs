use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma, Geometric, Normal, Poisson, StandardNormal, Uniform};
use serde::Serialize;

use crate::error::{OtError, Result};
use crate::Distribution;

/// Distribution family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// Per-coordinate `N(mean_k, scale²)`. An empty mean means the origin.
    Gaussian {
        mean: Vec<f64>,
        scale: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Poisson {
        rate: f64,
    },
    /// Number of failures before the first success, support `{0, 1, 2, ...}`.
    Geometric {
        p: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub family: Family,
    pub dimension: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(family: Family, dimension: usize, sample_count: usize, seed: u64) -> Self {
        Self { family, dimension, sample_count, seed }
    }

    /// Standard normal on `ℝⁿ`.
    pub fn standard_gaussian(dimension: usize, sample_count: usize, seed: u64) -> Self {
        Self::new(Family::Gaussian { mean: Vec::new(), scale: 1.0 }, dimension, sample_count, seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(OtError::InvalidSamplerSpec(m));
        if self.dimension == 0 {
            return bad("dimension must be positive".into());
        }
        if self.sample_count == 0 {
            return bad("sample_count must be positive".into());
        }
        match &self.family {
            Family::Gaussian { mean, scale } => {
                if !mean.is_empty() && mean.len() != self.dimension {
                    return bad(format!("mean has {} entries for dimension {}", mean.len(), self.dimension));
                }
                if !(*scale > 0.0) || !scale.is_finite() || mean.iter().any(|m| !m.is_finite()) {
                    return bad("gaussian needs finite mean and positive scale".into());
                }
            }
            Family::Uniform { low, high } => {
                if !(high > low) || !low.is_finite() || !high.is_finite() {
                    return bad(format!("uniform needs low < high, got [{low}, {high})"));
                }
            }
            Family::Poisson { rate } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return bad(format!("poisson rate must be positive, got {rate}"));
                }
            }
            Family::Geometric { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return bad(format!("geometric p must lie in (0, 1], got {p}"));
                }
            }
            Family::Gamma { shape, rate } => {
                if !(*shape > 0.0) || !(*rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
                    return bad(format!("gamma needs positive shape and rate, got ({shape}, {rate})"));
                }
            }
        }
        Ok(())
    }
}

/// Draws `sample_count` i.i.d. points (coordinates i.i.d.) with uniform masses.
pub fn sample_distribution(spec: &SamplerSpec) -> Result<Distribution> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.dimension;
    let total = n * spec.sample_count;
    let invalid = |e: &dyn std::fmt::Display| OtError::InvalidSamplerSpec(e.to_string());
    let coords: Vec<f64> = match &spec.family {
        Family::Gaussian { mean, scale } => {
            let normal = Normal::new(0.0, *scale).map_err(|e| invalid(&e))?;
            (0..total).map(|k| normal.sample(&mut rng) + mean.get(k % n).copied().unwrap_or(0.0)).collect()
        }
        Family::Uniform { low, high } => {
            let u = Uniform::new(*low, *high).map_err(|e| invalid(&e))?;
            (0..total).map(|_| u.sample(&mut rng)).collect()
        }
        Family::Poisson { rate } => {
            let d = Poisson::new(*rate).map_err(|e| invalid(&e))?;
            (0..total).map(|_| d.sample(&mut rng)).collect()
        }
        Family::Geometric { p } => {
            let d = Geometric::new(*p).map_err(|e| invalid(&e))?;
            (0..total).map(|_| d.sample(&mut rng) as f64).collect()
        }
        Family::Gamma { shape, rate } => {
            let d = Gamma::new(*shape, 1.0 / rate).map_err(|e| invalid(&e))?;
            (0..total).map(|_| d.sample(&mut rng)).collect()
        }
    };
    Distribution::from_flat(n, coords, vec![1.0; spec.sample_count])
}

pub fn translate_distribution(d: &Distribution, t: &[f64]) -> Result<Distribution> {
    d.translate(t)
}

/// Direction drawn uniformly from the unit sphere in `ℝ^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform direction, length uniform in `[0, max_len]`.
pub fn random_translation(max_len: f64, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = random_unit_vector(dim, &mut rng);
    let len = if max_len > 0.0 { rng.random::<f64>() * max_len } else { 0.0 };
    dir.into_iter().map(|x| x * len).collect()
}

pub fn round_to_pixels(t: &[f64]) -> Vec<i64> {
    t.iter().map(|x| x.round() as i64).collect()
}

/// Mixes a base seed with a path of indices (SplitMix64 finalizer per step).
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut z = base;
    for &p in path {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
