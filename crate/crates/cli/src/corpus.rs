use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rwot::datasets::{
    load_grid_image, load_idx_images, load_idx_labels, load_labeled_manifest, load_named_manifest,
    load_sequence_manifest, synthetic_digits, LabeledImage,
};
use rwot::experiments::PatternItem;

/// Default class count for `synthetic:N`.
const SYNTHETIC_CLASSES: usize = 3;

pub fn labeled(spec: &str, labels: Option<&Path>, seed: u64, limit: Option<usize>) -> Result<Vec<LabeledImage>> {
    let mut corpus = if let Some(rest) = spec.strip_prefix("synthetic:") {
        if labels.is_some() {
            bail!("--labels only applies to IDX corpora");
        }
        let mut parts = rest.split(':');
        let count = parse_count(parts.next(), "synthetic image count")?;
        let classes = match parts.next() {
            Some(c) => parse_count(Some(c), "synthetic class count")?,
            None => SYNTHETIC_CLASSES,
        };
        if parts.next().is_some() {
            bail!("expected synthetic:N or synthetic:N:CLASSES, got {spec:?}");
        }
        synthetic_digits(count, classes, seed)?
    } else if let Some(labels) = labels {
        let images = load_idx_images(spec).with_context(|| format!("reading IDX images {spec}"))?;
        let labels = load_idx_labels(labels).with_context(|| format!("reading IDX labels {}", labels.display()))?;
        if images.len() != labels.len() {
            bail!("{} images but {} labels", images.len(), labels.len());
        }
        images.into_iter().zip(labels).map(|(image, label)| LabeledImage { label, image }).collect()
    } else {
        load_labeled_manifest(spec).with_context(|| format!("reading manifest {spec}"))?
    };
    if let Some(n) = limit {
        if n == 0 {
            bail!("--limit must be positive");
        }
        corpus.truncate(n);
    }
    Ok(corpus)
}

fn parse_count(s: Option<&str>, what: &str) -> Result<usize> {
    let s = s.ok_or_else(|| anyhow!("missing {what}"))?;
    s.parse().map_err(|_| anyhow!("bad {what} {s:?}"))
}

pub fn pattern(id: String, path: &Path, sequence: bool) -> Result<PatternItem> {
    let ctx = || format!("reading {}", path.display());
    Ok(if sequence {
        PatternItem::sequence(id, load_sequence_manifest(path).with_context(ctx)?)
    } else {
        PatternItem::snapshot(id, load_grid_image(path).with_context(ctx)?)
    })
}

pub fn patterns(manifest: &Path, sequence: bool) -> Result<Vec<PatternItem>> {
    load_named_manifest(manifest)
        .with_context(|| format!("reading manifest {}", manifest.display()))?
        .into_iter()
        .map(|(id, path)| pattern(id, &path, sequence))
        .collect()
}

pub fn file_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}
