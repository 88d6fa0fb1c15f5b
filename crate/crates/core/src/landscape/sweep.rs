use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde_json::Map;

use super::grid::{GridMetadata, LandscapeGrid};
use super::region::Region;
use crate::error::{Error, Result};
use crate::nets::{run_cells, InputMode, LayerSource, PairInputs, TopologyConfig};
use crate::par::{current_threads, Executor};

pub const DEFAULT_DEPTH: usize = 1000;
pub const DEFAULT_AVG_LAST: usize = 20;
pub const DEFAULT_MEM_BUDGET: usize = 2 << 30;

/// What a landscape is a function of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub topology: TopologyConfig,
    pub depth: usize,
    pub avg_last: usize,
    pub master_seed: u64,
    pub input_mode: InputMode,
}

impl SweepSpec {
    pub fn new(topology: TopologyConfig, master_seed: u64) -> Self {
        Self {
            topology,
            depth: DEFAULT_DEPTH,
            avg_last: DEFAULT_AVG_LAST,
            master_seed,
            input_mode: InputMode::Independent,
        }
    }

    pub fn with_depth(mut self, depth: usize, avg_last: usize) -> Self {
        self.depth = depth;
        self.avg_last = avg_last;
        self
    }

    pub fn with_input_mode(mut self, mode: InputMode) -> Self {
        self.input_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.input_mode.validate()?;
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.avg_last == 0 || self.avg_last > self.depth {
            return Err(Error::Config(format!("avg_last must be in 1..={}, got {}", self.depth, self.avg_last)));
        }
        Ok(())
    }
}

/// Work done so far, in cell-layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
}

pub type ProgressFn = Arc<dyn Fn(Progress) + Send + Sync>;

/// How a sweep is executed; never changes the values.
#[derive(Clone)]
pub struct SweepOptions {
    pub executor: Executor,
    /// Layer draws are cached when they fit, regenerated per work unit otherwise.
    pub mem_budget: usize,
    pub progress: Option<ProgressFn>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { executor: Executor::Parallel, mem_budget: DEFAULT_MEM_BUDGET, progress: None }
    }
}

impl std::fmt::Debug for SweepOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SweepOptions")
            .field("executor", &self.executor)
            .field("mem_budget", &self.mem_budget)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

/// Cells per work unit: `cached_unit` when layers are shared from the cache,
/// otherwise one unit per worker since every unit regenerates all layers.
fn unit_size(source: &LayerSource, options: &SweepOptions, cells: usize, cached_unit: usize) -> usize {
    if source.is_cached() {
        return cached_unit.max(1);
    }
    let workers = match options.executor {
        Executor::Sequential => 1,
        Executor::Parallel => current_threads(),
    };
    cells.div_ceil(workers).max(1)
}

/// Tail-averaged divergence at arbitrary `(σ_w, σ_b)` points, all sharing
/// the network realization and inputs fixed by `spec`.
pub fn evaluate_points(spec: &SweepSpec, points: &[(f64, f64)], options: &SweepOptions) -> Result<Vec<f64>> {
    spec.validate()?;
    if let Some(&(w, b)) = points.iter().find(|(w, b)| !(w.is_finite() && b.is_finite())) {
        return Err(Error::Config(format!("non-finite grid point ({w}, {b})")));
    }
    let source = LayerSource::new(spec.topology, spec.master_seed, spec.depth, options.mem_budget);
    let unit = unit_size(&source, options, points.len(), 64);
    evaluate_units(spec, &source, points, unit, options)
}

fn evaluate_units(
    spec: &SweepSpec,
    source: &LayerSource,
    points: &[(f64, f64)],
    unit: usize,
    options: &SweepOptions,
) -> Result<Vec<f64>> {
    let inputs = PairInputs::generate(spec.master_seed, spec.topology.width, spec.input_mode)?;
    let first_tail = spec.depth - spec.avg_last + 1;
    let done = AtomicU64::new(0);
    let total = (points.len() * spec.depth) as u64;
    let chunks: Vec<&[(f64, f64)]> = points.chunks(unit).collect();
    log::debug!(
        "evaluating {} cells in {} units ({} layer source)",
        points.len(),
        chunks.len(),
        if source.is_cached() { "cached" } else { "regenerating" }
    );
    let results = options.executor.map(chunks.len(), |u| -> Result<Vec<f64>> {
        let cells = chunks[u];
        let mut sums = vec![0.0; cells.len()];
        run_cells(source, &inputs, cells, |d, l| {
            if d >= first_tail {
                sums.iter_mut().zip(l).for_each(|(s, v)| *s += v);
            }
            if let Some(report) = &options.progress {
                let now = done.fetch_add(cells.len() as u64, Ordering::Relaxed) + cells.len() as u64;
                report(Progress { done: now, total });
            }
        })?;
        Ok(sums.into_iter().map(|s| s / spec.avg_last as f64).collect())
    });
    let mut values = Vec::with_capacity(points.len());
    for r in results {
        values.extend(r?);
    }
    Ok(values)
}

/// Evaluates every cell of `region`.
pub fn sweep(spec: &SweepSpec, region: &Region, options: &SweepOptions) -> Result<LandscapeGrid> {
    region.validate()?;
    spec.validate()?;
    let points = region.points();
    let source = LayerSource::new(spec.topology, spec.master_seed, spec.depth, options.mem_budget);
    let unit = unit_size(&source, options, points.len(), region.sigma_w.count);
    let values = evaluate_units(spec, &source, &points, unit, options)?;
    let metadata = GridMetadata {
        topology: spec.topology,
        depth: spec.depth,
        avg_last: spec.avg_last,
        master_seed: spec.master_seed,
        input_mode: spec.input_mode,
        sigma_w: region.sigma_w,
        sigma_b: region.sigma_b,
        lineage: Vec::new(),
        extra: Map::new(),
    };
    LandscapeGrid::new(metadata, values.into_iter().map(|v| v as f32).collect())
}

impl GridMetadata {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            topology: self.topology,
            depth: self.depth,
            avg_last: self.avg_last,
            master_seed: self.master_seed,
            input_mode: self.input_mode,
        }
    }
}

/// Re-sweeps `sub_region` with the parent's network and records the parent
/// region in the lineage.
pub fn zoom(parent: &LandscapeGrid, sub_region: &Region, options: &SweepOptions) -> Result<LandscapeGrid> {
    let outer = parent.region();
    if !outer.contains(sub_region) {
        return Err(Error::Region(format!(
            "zoom region σ_w [{}, {}] × σ_b [{}, {}] is not inside the parent's σ_w [{}, {}] × σ_b [{}, {}]",
            sub_region.sigma_w.min,
            sub_region.sigma_w.max,
            sub_region.sigma_b.min,
            sub_region.sigma_b.max,
            outer.sigma_w.min,
            outer.sigma_w.max,
            outer.sigma_b.min,
            outer.sigma_b.max
        )));
    }
    let mut child = sweep(&parent.metadata.spec(), sub_region, options)?;
    child.metadata.lineage = parent.metadata.lineage.clone();
    child.metadata.lineage.push(outer);
    child.metadata.extra = parent.metadata.extra.clone();
    Ok(child)
}
