//! Time-series ingestion and the normal-prior phase grid.
//!
//! A CSV column (Jena-climate layout: header row, quoted names, one sample
//! per row) is reduced to its mean and population variance, which
//! parameterize a normal prior over the unknown phase. The prior is
//! discretized on the grid
//!
//! ```text
//! φ_x = μ - 1 + (2x + 1)/P,   x = 0..P-1
//! ```
//!
//! spanning `(μ-1, μ+1)` with uniform spacing `2/P`, and weighted by the
//! normal pdf at each node, normalized to sum to 1.

use std::path::Path;
use thiserror::Error;

/// Errors from ingestion, statistics, and grid construction.
#[derive(Debug, Error)]
pub enum PriorError {
    /// File missing or unreadable, or the CSV structure is broken.
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: csv::Error,
    },
    /// Header row has no column with the requested name.
    #[error("column {column:?} not found; available columns: {}", available.join(", "))]
    ColumnNotFound { column: String, available: Vec<String> },
    /// A row's target field failed to parse as a number.
    #[error("data row {row}: cannot parse {value:?} as a number")]
    Malformed { row: usize, value: String },
    /// Statistics require at least two samples.
    #[error("need at least 2 values, got {count}")]
    TooFewValues { count: usize },
    /// Grid needs at least two partitions.
    #[error("partitions must be at least 2, got {partitions}")]
    BadPartitions { partitions: usize },
    /// The prior needs strictly positive variance.
    #[error("variance must be positive and finite, got {variance}")]
    BadVariance { variance: f64 },
    /// Grid mean must be finite.
    #[error("mean must be finite, got {mean}")]
    BadMean { mean: f64 },
}

/// Mean and population variance of an ingested series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    /// Population variance (divisor N).
    pub variance: f64,
    pub count: usize,
}

/// Discretized normal prior over the phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiGrid {
    partitions: usize,
    phis: Vec<f64>,
    weights: Vec<f64>,
}

impl PhiGrid {
    pub fn partitions(&self) -> usize {
        self.partitions
    }

    /// Grid nodes, strictly increasing with spacing `2/P`.
    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Normalized prior weights; non-negative, summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(φ_x, w_x)` pairs in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.phis.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Reads one numeric column from a headered CSV file, in file order.
///
/// Any row whose target field does not parse as a number aborts the load
/// with that row's (1-based) data-row number.
pub fn load_series(path: impl AsRef<Path>, column: &str) -> Result<Vec<f64>, PriorError> {
    let path_str = path.as_ref().display().to_string();
    let wrap = |source: csv::Error| PriorError::Read { path: path_str.clone(), source };
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(wrap)?;
    let headers = reader.headers().map_err(wrap)?;
    let col = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| PriorError::ColumnNotFound {
            column: column.to_string(),
            available: headers.iter().map(str::to_string).collect(),
        })?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(wrap)?;
        let raw = record.get(col).unwrap_or("");
        let parsed: f64 = raw.trim().parse().map_err(|_| PriorError::Malformed {
            row: i + 1,
            value: raw.to_string(),
        })?;
        values.push(parsed);
    }
    Ok(values)
}

/// Mean and population variance (divisor N) of a series, two-pass.
pub fn stats(values: &[f64]) -> Result<SeriesStats, PriorError> {
    if values.len() < 2 {
        return Err(PriorError::TooFewValues { count: values.len() });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(SeriesStats { mean, variance, count: values.len() })
}

/// Normal probability density with the given mean and variance.
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    (-d * d / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Builds the φ-grid around `mean` with prior weights from the normal pdf.
pub fn build_grid(mean: f64, variance: f64, partitions: usize) -> Result<PhiGrid, PriorError> {
    if partitions < 2 {
        return Err(PriorError::BadPartitions { partitions });
    }
    if !variance.is_finite() || variance <= 0.0 {
        return Err(PriorError::BadVariance { variance });
    }
    if !mean.is_finite() {
        return Err(PriorError::BadMean { mean });
    }
    let p = partitions as f64;
    let phis: Vec<f64> = (0..partitions)
        .map(|x| mean - 1.0 + (2.0 * x as f64 + 1.0) / p)
        .collect();
    let raw: Vec<f64> = phis.iter().map(|&phi| normal_pdf(phi, mean, variance)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    Ok(PhiGrid { partitions, phis, weights })
}
