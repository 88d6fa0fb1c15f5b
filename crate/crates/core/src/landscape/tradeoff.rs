use serde::Serialize;

use super::sweep::SweepOptions;
use crate::error::{Error, Result};
use crate::nets::{run_cells, InputMode, LayerSource, PairInputs, TopologyConfig};

/// Relative input perturbation of the robustness experiment.
pub const DEFAULT_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub sigma_w: f64,
    pub depth: usize,
    pub independent: f64,
    pub perturbed: f64,
}

/// Divergence of independent and of ε-perturbed input pairs through the same
/// network, read off at each requested depth. Rows are ordered by σ_w, then
/// by depth as given.
pub fn tradeoff_scan(
    cfg: &TopologyConfig,
    sigma_b: f64,
    sigma_w_values: &[f64],
    depths: &[usize],
    master_seed: u64,
    epsilon: f64,
    options: &SweepOptions,
) -> Result<Vec<TradeoffRow>> {
    cfg.validate()?;
    if depths.is_empty() || depths.contains(&0) {
        return Err(Error::Config("depths must be a non-empty list of positive integers".into()));
    }
    if !sigma_b.is_finite() || sigma_w_values.iter().any(|w| !w.is_finite()) {
        return Err(Error::Config("σ values must be finite".into()));
    }
    let max_depth = *depths.iter().max().expect("non-empty");
    let source = LayerSource::new(*cfg, master_seed, max_depth, options.mem_budget);
    let points: Vec<(f64, f64)> = sigma_w_values.iter().map(|&w| (w, sigma_b)).collect();
    let modes = [InputMode::Independent, InputMode::Perturbed { epsilon }];
    let runs = options.executor.map(modes.len(), |m| -> Result<Vec<Vec<f64>>> {
        let inputs = PairInputs::generate(master_seed, cfg.width, modes[m])?;
        let mut at_depth = vec![Vec::new(); depths.len()];
        run_cells(&source, &inputs, &points, |d, l| {
            for (slot, _) in depths.iter().enumerate().filter(|(_, &want)| want == d) {
                at_depth[slot] = l.to_vec();
            }
        })?;
        Ok(at_depth)
    });
    let mut runs = runs.into_iter();
    let independent = runs.next().expect("two modes")?;
    let perturbed = runs.next().expect("two modes")?;
    let mut rows = Vec::with_capacity(points.len() * depths.len());
    for (c, &sigma_w) in sigma_w_values.iter().enumerate() {
        for (slot, &depth) in depths.iter().enumerate() {
            rows.push(TradeoffRow { sigma_w, depth, independent: independent[slot][c], perturbed: perturbed[slot][c] });
        }
    }
    Ok(rows)
}
