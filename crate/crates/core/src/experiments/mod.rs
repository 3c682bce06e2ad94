//! Experiment harnesses: shift sweep, translated-image kNN, and top-k search.
//!
//! Every harness is a deterministic function of its configuration and seed;
//! only the `runtime_seconds` column depends on the machine.

mod knn;
mod search;
mod sweep;

pub use knn::{knn_classify, ClassificationResult, KnnConfig};
pub use search::{topk_search, PatternItem, SearchResult};
pub use sweep::{shift_sweep, SweepMethod, SweepResult};

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{OtError, Result};

/// Distances compared by the harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    L1,
    L2,
    W1,
    W2,
    RW2,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::L1, Metric::L2, Metric::W1, Metric::W2, Metric::RW2];

    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "L1",
            Metric::L2 => "L2",
            Metric::W1 => "W1",
            Metric::W2 => "W2",
            Metric::RW2 => "RW2",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric {s:?} (expected one of L1, L2, W1, W2, RW2)"))
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One CSV row per element, headers taken from the field names.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_csv<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

fn csv_error(e: csv::Error) -> OtError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => OtError::Io(io),
        other => OtError::InvalidExperiment(format!("csv output: {other:?}")),
    }
}
