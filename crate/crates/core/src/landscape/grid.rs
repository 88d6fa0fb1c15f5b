use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::region::{Axis, Region};
use crate::error::{Error, Result};
use crate::nets::{InputMode, TopologyConfig};

/// Everything needed to recompute a grid, plus whatever else the producer
/// chose to record. Unknown keys survive a load/save cycle through `extra`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub topology: TopologyConfig,
    pub depth: usize,
    pub avg_last: usize,
    pub master_seed: u64,
    pub input_mode: InputMode,
    pub sigma_w: Axis,
    pub sigma_b: Axis,
    /// Regions of the ancestors this grid was zoomed from, outermost first.
    #[serde(default)]
    pub lineage: Vec<Region>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl GridMetadata {
    pub fn region(&self) -> Region {
        Region { sigma_w: self.sigma_w, sigma_b: self.sigma_b }
    }
}

/// Tail-averaged divergence over a `(σ_w, σ_b)` grid.
///
/// `values` is row-major: row `i` is `σ_b = sigma_b.value(i)`, column `j` is
/// `σ_w = sigma_w.value(j)`. Values are stored in single precision, which is
/// also the on-disk format.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub metadata: GridMetadata,
    pub values: Vec<f32>,
}

impl LandscapeGrid {
    pub fn new(metadata: GridMetadata, values: Vec<f32>) -> Result<Self> {
        let expected = metadata.sigma_w.count * metadata.sigma_b.count;
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain(format!(
                "grid value {} at index {i} is not a finite non-negative number",
                values[i]
            )));
        }
        Ok(Self { metadata, values })
    }

    pub fn rows(&self) -> usize {
        self.metadata.sigma_b.count
    }

    pub fn cols(&self) -> usize {
        self.metadata.sigma_w.count
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.cols() + col]
    }

    pub fn sigma_w_axis(&self) -> Vec<f64> {
        self.metadata.sigma_w.values()
    }

    pub fn sigma_b_axis(&self) -> Vec<f64> {
        self.metadata.sigma_b.values()
    }

    pub fn region(&self) -> Region {
        self.metadata.region()
    }

    /// `(min, max)` of the values.
    pub fn range(&self) -> (f32, f32) {
        self.values.iter().fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}
