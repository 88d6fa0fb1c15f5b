use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 8;

/// Evenly spaced samples `min, …, max` (both endpoints included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Region(format!("{name} range [{}, {}] must satisfy min < max", self.min, self.max)));
        }
        if self.count < MIN_RESOLUTION {
            return Err(Error::Region(format!(
                "{name} resolution must be at least {MIN_RESOLUTION}, got {}",
                self.count
            )));
        }
        Ok(())
    }

    fn contains(&self, other: &Axis) -> bool {
        let slack = 1e-12 * (self.max - self.min);
        other.min >= self.min - slack && other.max <= self.max + slack
    }
}

/// Rectangle in the `(σ_w, σ_b)` plane with a sample count per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub sigma_w: Axis,
    pub sigma_b: Axis,
}

impl Region {
    pub fn new(sigma_w: Axis, sigma_b: Axis) -> Result<Self> {
        let region = Self { sigma_w, sigma_b };
        region.validate()?;
        Ok(region)
    }

    /// Same resolution on both axes.
    pub fn square(sw: (f64, f64), sb: (f64, f64), resolution: usize) -> Result<Self> {
        Self::new(Axis::new(sw.0, sw.1, resolution), Axis::new(sb.0, sb.1, resolution))
    }

    pub fn validate(&self) -> Result<()> {
        self.sigma_w.validate("σ_w")?;
        self.sigma_b.validate("σ_b")
    }

    pub fn contains(&self, other: &Region) -> bool {
        self.sigma_w.contains(&other.sigma_w) && self.sigma_b.contains(&other.sigma_b)
    }

    pub fn cells(&self) -> usize {
        self.sigma_w.count * self.sigma_b.count
    }

    /// `(σ_w, σ_b)` of every cell, row-major with σ_b rows.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let sw = self.sigma_w.values();
        self.sigma_b.values().into_iter().flat_map(|b| sw.iter().map(move |&w| (w, b))).collect()
    }
}
