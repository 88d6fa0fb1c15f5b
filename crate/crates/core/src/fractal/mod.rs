//! Box-counting dimension of the sub-threshold frontier of a landscape.

mod boxcount;
mod field;

use serde::{Deserialize, Serialize};

pub use boxcount::{box_count, fit_dimension, MIN_SCALES};
pub use field::{binarize, extract_boundary, BinaryField, BoundarySet};

use crate::error::{Error, Result};
use crate::landscape::LandscapeGrid;
use crate::par::Executor;

pub const DEFAULT_THRESHOLD_COUNT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Thresholds {
    /// Evenly spaced quantiles of the grid values strictly between the 1st
    /// and 99th percentiles; repeated values are dropped.
    Quantiles(usize),
    Explicit(Vec<f64>),
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::Quantiles(DEFAULT_THRESHOLD_COUNT)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub tau: f64,
    pub boundary_pixels: usize,
    pub box_counts: Vec<(u32, u64)>,
    pub dimension: Option<f64>,
    pub residual: Option<f64>,
    /// Why no dimension was recorded.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestThreshold {
    pub tau: f64,
    pub dimension: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalReport {
    pub grid_size: usize,
    pub j_min: u32,
    pub j_max: u32,
    /// Box grid placement; always `origin` (no offset averaging).
    pub anchor: String,
    pub records: Vec<ThresholdRecord>,
    pub best: BestThreshold,
}

/// `(2, ⌊log₂ size⌋ − 2)`.
pub fn default_scales(grid_size: usize) -> (u32, u32) {
    (2, grid_size.max(1).ilog2().saturating_sub(2))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile_thresholds(grid: &LandscapeGrid, count: usize) -> Vec<f64> {
    let mut sorted: Vec<f64> = grid.values.iter().map(|&v| f64::from(v)).collect();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<f64> =
        (1..=count).map(|k| quantile(&sorted, 0.01 + 0.98 * k as f64 / (count + 1) as f64)).collect();
    out.dedup();
    out
}

fn analyse(grid: &LandscapeGrid, tau: f64, grid_size: usize, j_min: u32, j_max: u32) -> ThresholdRecord {
    let boundary = extract_boundary(&binarize(grid, tau));
    let mut record = ThresholdRecord {
        tau,
        boundary_pixels: boundary.len(),
        box_counts: Vec::new(),
        dimension: None,
        residual: None,
        failure: None,
    };
    if boundary.is_empty() {
        record.failure = Some(Error::EmptyBoundary.to_string());
        return record;
    }
    let counts: Result<Vec<(u32, u64)>> =
        (j_min..=j_max).map(|j| box_count(&boundary, grid_size, j).map(|n| (j, n))).collect();
    match counts.and_then(|c| fit_dimension(&c).map(|fit| (c, fit))) {
        Ok((c, (d, r))) => {
            record.box_counts = c;
            record.dimension = Some(d);
            record.residual = Some(r);
        }
        Err(e) => record.failure = Some(e.to_string()),
    }
    record
}

/// Dimension estimate for each threshold; the frontier's dimension is the
/// largest of them.
pub fn dimension_sweep(
    grid: &LandscapeGrid,
    thresholds: &Thresholds,
    scales: Option<(u32, u32)>,
    executor: Executor,
) -> Result<FractalReport> {
    if grid.values.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let grid_size = grid.rows().max(grid.cols());
    let (j_min, j_max) = scales.unwrap_or_else(|| default_scales(grid_size));
    let finest = grid_size.ilog2();
    if j_max > finest || j_min > j_max {
        return Err(Error::Config(format!(
            "scale range {j_min}..={j_max} must be ordered and end at most at {finest} for a {grid_size}-pixel grid"
        )));
    }
    let scale_count = (j_max - j_min + 1) as usize;
    if scale_count < MIN_SCALES {
        return Err(Error::InsufficientScales { required: MIN_SCALES, actual: scale_count });
    }
    let taus = match thresholds {
        Thresholds::Quantiles(n) => quantile_thresholds(grid, *n),
        Thresholds::Explicit(t) => t.clone(),
    };
    if taus.is_empty() {
        return Err(Error::Config("no thresholds".into()));
    }
    let records = executor.map(taus.len(), |i| analyse(grid, taus[i], grid_size, j_min, j_max));
    let best = records.iter().filter_map(|r| r.dimension.map(|d| BestThreshold { tau: r.tau, dimension: d })).fold(
        None,
        |acc: Option<BestThreshold>, b| match acc {
            Some(a) if a.dimension >= b.dimension => Some(a),
            _ => Some(b),
        },
    );
    let Some(best) = best else {
        return Err(Error::AllThresholdsDegenerate(
            records.iter().map(|r| format!("τ = {}: {}", r.tau, r.failure.as_deref().unwrap_or("no fit"))).collect(),
        ));
    };
    Ok(FractalReport { grid_size, j_min, j_max, anchor: "origin".into(), records, best })
}
