use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{mean_std, Metric};
use crate::datasets::{
    derive_seed, embed_and_translate, image_to_distribution, random_unit_vector, round_to_pixels, GridImage,
    LabeledImage,
};
use crate::error::{OtError, Result};
use crate::relative::rw2_sinkhorn;
use crate::transport::{wasserstein_distance, SinkhornConfig, Solver};
use crate::Distribution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnConfig {
    pub translation_lengths: Vec<u32>,
    pub metrics: Vec<Metric>,
    pub k: usize,
    /// Fraction of the corpus held out for testing.
    pub test_ratio: f64,
    pub repeats: usize,
    pub seed: u64,
    pub canvas_width: usize,
    pub canvas_height: usize,
    pub sinkhorn: SinkhornConfig<f64>,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            translation_lengths: vec![0, 4, 8, 12, 16, 20, 24, 28],
            metrics: Metric::ALL.to_vec(),
            k: 1,
            test_ratio: 0.25,
            repeats: 10,
            seed: 42,
            canvas_width: 84,
            canvas_height: 84,
            sinkhorn: SinkhornConfig::new(0.1, 0.1),
        }
    }
}

/// Accuracy of one metric at one translation length, over all repeats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub translation_length: u32,
    pub metric: Metric,
    pub accuracy: f64,
    /// Sample standard deviation of the per-repeat accuracies.
    pub std: f64,
    pub sample_size: usize,
    pub k: usize,
    pub repeats: usize,
    /// Pairs whose distance could not be computed and were ranked last.
    pub failures: usize,
    pub lambda: f64,
    pub epsilon: f64,
}

struct Prepared {
    canvas: GridImage,
    dist: Distribution,
}

/// k-nearest-neighbour classification of randomly translated images.
///
/// For every length, each image gets its own seeded direction; the offset is
/// `length` times that direction rounded to whole pixels, applied after
/// centring the image on the canvas. The train/test split of a repeat depends
/// only on `(seed, repeat)`, so every length sees the same split.
/// L1/L2 compare raw canvas intensities; W1 is the entropic `p = 1` cost; W2
/// and RW2 come from one RW₂ Sinkhorn run (W2 through the Pythagorean identity).
pub fn knn_classify(corpus: &[LabeledImage], cfg: &KnnConfig) -> Result<Vec<ClassificationResult>> {
    validate(corpus, cfg)?;
    let n = corpus.len();
    let n_test = ((n as f64 * cfg.test_ratio).round() as usize).clamp(1, n - 1);

    let mut results = Vec::new();
    for &length in &cfg.translation_lengths {
        let mut acc: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut failures = vec![0usize; cfg.metrics.len()];
        for repeat in 0..cfg.repeats {
            let prepared = prepare(corpus, cfg, length, repeat)?;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[u64::MAX, repeat as u64])));
            let (test, train) = order.split_at(n_test);

            let per_test: Vec<(Vec<usize>, Vec<usize>)> =
                test.par_iter().map(|&q| classify_one(q, train, corpus, &prepared, cfg)).collect();
            for (m, _) in cfg.metrics.iter().enumerate() {
                let correct = per_test.iter().zip(test).filter(|((pred, _), &q)| pred[m] == corpus[q].label).count();
                acc.entry(m).or_default().push(correct as f64 / n_test as f64);
                failures[m] += per_test.iter().map(|(_, f)| f[m]).sum::<usize>();
            }
        }
        for (m, &metric) in cfg.metrics.iter().enumerate() {
            let (accuracy, std) = mean_std(&acc[&m]);
            results.push(ClassificationResult {
                translation_length: length,
                metric,
                accuracy,
                std,
                sample_size: n,
                k: cfg.k,
                repeats: cfg.repeats,
                failures: failures[m],
                lambda: cfg.sinkhorn.lambda,
                epsilon: cfg.sinkhorn.epsilon,
            });
        }
    }
    Ok(results)
}

fn validate(corpus: &[LabeledImage], cfg: &KnnConfig) -> Result<()> {
    let bad = |m: String| Err(OtError::InvalidExperiment(m));
    cfg.sinkhorn.validate()?;
    if cfg.k == 0 || cfg.k.is_multiple_of(2) {
        return bad(format!("k must be odd and positive, got {}", cfg.k));
    }
    if cfg.repeats == 0 {
        return bad("repeats must be at least 1".into());
    }
    if !(cfg.test_ratio > 0.0 && cfg.test_ratio < 1.0) {
        return bad(format!("test ratio must lie in (0, 1), got {}", cfg.test_ratio));
    }
    if cfg.metrics.is_empty() {
        return bad("no metrics requested".into());
    }
    if corpus.len() < 2 {
        return Err(OtError::EmptyCorpus);
    }
    let first = corpus[0].label;
    if corpus.iter().all(|c| c.label == first) {
        return bad("corpus needs at least two classes".into());
    }
    Ok(())
}

fn prepare(corpus: &[LabeledImage], cfg: &KnnConfig, length: u32, repeat: usize) -> Result<Vec<Prepared>> {
    corpus
        .par_iter()
        .enumerate()
        .map(|(idx, item)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[length as u64, repeat as u64, idx as u64]));
            let dir = random_unit_vector(2, &mut rng);
            let t = round_to_pixels(&[dir[0] * length as f64, dir[1] * length as f64]);
            let canvas = embed_and_translate(&item.image, cfg.canvas_width, cfg.canvas_height, [t[0], t[1]])?;
            let dist = image_to_distribution(&canvas)?;
            Ok(Prepared { canvas, dist })
        })
        .collect()
}

/// Predicted label and failure count per requested metric.
fn classify_one(
    q: usize,
    train: &[usize],
    corpus: &[LabeledImage],
    prepared: &[Prepared],
    cfg: &KnnConfig,
) -> (Vec<usize>, Vec<usize>) {
    let wants_rw = cfg.metrics.iter().any(|m| matches!(m, Metric::W2 | Metric::RW2));
    let mut dists = vec![Vec::with_capacity(train.len()); cfg.metrics.len()];
    let mut failures = vec![0; cfg.metrics.len()];
    let query = &prepared[q];
    for &t in train {
        let cand = &prepared[t];
        let rw = if wants_rw { rw2_sinkhorn(&query.dist, &cand.dist, &cfg.sinkhorn).ok() } else { None };
        for (m, metric) in cfg.metrics.iter().enumerate() {
            let d = match metric {
                Metric::L1 => Some(lp_distance(query.canvas.intensities(), cand.canvas.intensities(), 1)),
                Metric::L2 => Some(lp_distance(query.canvas.intensities(), cand.canvas.intensities(), 2)),
                Metric::W1 => wasserstein_distance(&query.dist, &cand.dist, 1.0, &Solver::Entropic(cfg.sinkhorn)).ok(),
                Metric::W2 => rw.as_ref().and_then(|r| r.w_distance),
                Metric::RW2 => rw.as_ref().map(|r| r.rw_distance),
            };
            let d = match d {
                Some(x) if x.is_finite() => x,
                _ => {
                    failures[m] += 1;
                    f64::INFINITY
                }
            };
            dists[m].push((d, t));
        }
    }
    let preds = dists
        .into_iter()
        .map(|mut ds| {
            ds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            majority(ds.iter().take(cfg.k).map(|&(_, t)| corpus[t].label))
        })
        .collect();
    (preds, failures)
}

fn lp_distance(a: &[f64], b: &[f64], p: u8) -> f64 {
    match p {
        1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        _ => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
    }
}

/// Most frequent label; ties go to the smallest label.
fn majority(labels: impl Iterator<Item = usize>) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    counts.into_iter().find(|&(_, c)| c == best).map(|(l, _)| l).unwrap_or(0)
}
