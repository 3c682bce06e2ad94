use rayon::prelude::*;
use serde::Serialize;

use super::Metric;
use crate::datasets::{image_to_distribution, GridImage};
use crate::error::{OtError, Result};
use crate::relative::rw2_sinkhorn;
use crate::transport::SinkhornConfig;
use crate::Distribution;

/// A snapshot (one frame) or a time-ordered sequence of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternItem {
    pub id: String,
    pub frames: Vec<GridImage>,
}

impl PatternItem {
    pub fn snapshot(id: impl Into<String>, image: GridImage) -> Self {
        Self { id: id.into(), frames: vec![image] }
    }

    pub fn sequence(id: impl Into<String>, frames: Vec<GridImage>) -> Self {
        Self { id: id.into(), frames }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub query_id: String,
    pub metric: Metric,
    pub ranked_ids: Vec<String>,
    /// Nondecreasing; `+∞` marks items whose distance could not be computed.
    pub distances: Vec<f64>,
}

/// The `k` corpus items closest to `query`.
///
/// Frame distances are W₂ or RW₂ between pixel distributions, both taken from
/// one RW₂ Sinkhorn run; a sequence distance is the sum over aligned frames.
/// Ties are broken by ascending id.
pub fn topk_search(
    corpus: &[PatternItem],
    query: &PatternItem,
    k: usize,
    metric: Metric,
    cfg: &SinkhornConfig<f64>,
) -> Result<SearchResult> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(OtError::EmptyCorpus);
    }
    if !matches!(metric, Metric::W2 | Metric::RW2) {
        return Err(OtError::InvalidExperiment(format!("search supports W2 and RW2, got {metric}")));
    }
    if k == 0 || k > corpus.len() {
        return Err(OtError::InvalidExperiment(format!("k = {k} outside 1..={}", corpus.len())));
    }
    if query.frames.is_empty() {
        return Err(OtError::InvalidExperiment("query has no frames".into()));
    }
    if let Some(bad) = corpus.iter().find(|c| c.frames.len() != query.frames.len()) {
        return Err(OtError::InvalidExperiment(format!(
            "item {} has {} frames, query has {}",
            bad.id,
            bad.frames.len(),
            query.frames.len()
        )));
    }

    let query_dists = query.frames.iter().map(image_to_distribution).collect::<Result<Vec<_>>>()?;
    let mut scored: Vec<(f64, &str)> = corpus
        .par_iter()
        .map(|item| -> Result<(f64, &str)> {
            let mut total = 0.0;
            for (frame, q) in item.frames.iter().zip(&query_dists) {
                total += frame_distance(q, &image_to_distribution(frame)?, metric, cfg);
            }
            Ok((total, item.id.as_str()))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    scored.truncate(k);

    Ok(SearchResult {
        query_id: query.id.clone(),
        metric,
        ranked_ids: scored.iter().map(|(_, id)| id.to_string()).collect(),
        distances: scored.iter().map(|(d, _)| *d).collect(),
    })
}

fn frame_distance(q: &Distribution, c: &Distribution, metric: Metric, cfg: &SinkhornConfig<f64>) -> f64 {
    match rw2_sinkhorn(q, c, cfg) {
        Ok(r) if metric == Metric::RW2 => r.rw_distance,
        Ok(r) => r.w_distance.unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}
