use serde::Serialize;

use super::fixed_point::{mean_field_divergence, SolverOptions};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::nets::Activation;
use crate::par::Executor;

/// Samples used to bracket the crossing and to check monotonicity.
const SCAN_POINTS: usize = 33;
/// Decreases smaller than this are solver noise in the ordered phase,
/// where `L*` sits at zero.
const MONOTONE_SLACK: f64 = 1e-6;

/// One σ_b row of the level set `{L* = τ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub sigma_b: f64,
    /// `None` when the row has no crossing in range or was skipped.
    pub sigma_w: Option<f64>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundarySearch {
    pub sigma_w_min: f64,
    pub sigma_w_max: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub tol: f64,
    pub activation: Activation,
    pub solver: SolverOptions,
}

impl Default for BoundarySearch {
    fn default() -> Self {
        Self {
            sigma_w_min: 0.0,
            sigma_w_max: 3.0,
            tol: 1e-6,
            activation: Activation::Erf,
            solver: SolverOptions::default(),
        }
    }
}

fn trace_row(tau: f64, sigma_b: f64, search: &BoundarySearch, rule: &QuadratureRule) -> BoundaryRow {
    let eval = |sw: f64| mean_field_divergence(sw, sigma_b, search.activation, rule, search.solver);
    let skipped = |msg: String| {
        log::warn!("boundary row σ_b = {sigma_b}: {msg}");
        BoundaryRow { sigma_b, sigma_w: None, warning: Some(msg) }
    };
    let span = search.sigma_w_max - search.sigma_w_min;
    let mut samples = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let sw = search.sigma_w_min + span * i as f64 / (SCAN_POINTS - 1) as f64;
        match eval(sw) {
            Ok(l) => samples.push((sw, l)),
            Err(e) => return skipped(format!("σ_w = {sw}: {e}")),
        }
    }
    if let Some(w) = samples.windows(2).find(|w| w[1].1 < w[0].1 - MONOTONE_SLACK * (1.0 + w[0].1)) {
        return skipped(format!("divergence not monotone in σ_w between {} and {}", w[0].0, w[1].0));
    }
    if samples[0].1 >= tau {
        return BoundaryRow { sigma_b, sigma_w: None, warning: None };
    }
    let Some(idx) = samples.iter().position(|&(_, l)| l >= tau) else {
        return BoundaryRow { sigma_b, sigma_w: None, warning: None };
    };
    let (mut lo, mut hi) = (samples[idx - 1].0, samples[idx].0);
    while hi - lo > search.tol {
        let mid = 0.5 * (lo + hi);
        match eval(mid) {
            Ok(l) if l >= tau => hi = mid,
            Ok(_) => lo = mid,
            Err(e) => return skipped(format!("σ_w = {mid}: {e}")),
        }
    }
    BoundaryRow { sigma_b, sigma_w: Some(0.5 * (lo + hi)), warning: None }
}

/// Locates `L*(σ_w, σ_b) = τ` along σ_w for every requested σ_b.
pub fn trace_boundary(
    tau: f64,
    sigma_b_values: &[f64],
    search: &BoundarySearch,
    rule: &QuadratureRule,
    exec: Executor,
) -> Result<Vec<BoundaryRow>> {
    if !(tau >= 0.0) {
        return Err(Error::Config(format!("threshold must be non-negative, got {tau}")));
    }
    if !(search.sigma_w_max > search.sigma_w_min) || !(search.tol > 0.0) {
        return Err(Error::Config("σ_w search range must be non-empty with a positive tolerance".into()));
    }
    Ok(exec.map(sigma_b_values.len(), |i| trace_row(tau, sigma_b_values[i], search, rule)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_bias_crossing_in_expected_band() {
        let rule = QuadratureRule::default();
        let rows = trace_boundary(0.01, &[1.0], &BoundarySearch::default(), &rule, Executor::Parallel).unwrap();
        let sw = rows[0].sigma_w.unwrap_or_else(|| panic!("{:?}", rows[0]));
        assert!((1.4..=1.9).contains(&sw), "{sw}");
    }

    #[test]
    fn zero_bias_crossing_near_critical_gain() {
        // bisection on the closed-form erf maps, iterated directly
        let g = |nu: f64, sw: f64| sw * sw * 2.0 / std::f64::consts::PI * (2.0 * nu / (1.0 + 2.0 * nu)).asin();
        let oracle_l = |sw: f64| {
            let mut nu = sw * sw;
            for _ in 0..200_000 {
                nu = g(nu, sw);
            }
            2.0 * nu
        };
        let (mut lo, mut hi) = (0.5, 1.5);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if oracle_l(mid) >= 0.01 {
                hi = mid
            } else {
                lo = mid
            }
        }
        let rule = QuadratureRule::default();
        let rows = trace_boundary(0.01, &[0.0], &BoundarySearch::default(), &rule, Executor::Sequential).unwrap();
        let sw = rows[0].sigma_w.unwrap();
        assert!((sw - lo).abs() < 1e-3, "{sw} vs oracle {lo}");
        assert!((0.85..1.0).contains(&sw));
    }

    #[test]
    fn unreachable_threshold_gives_empty_row() {
        let rule = QuadratureRule::gauss_hermite(48).unwrap();
        let rows = trace_boundary(1e6, &[1.0], &BoundarySearch::default(), &rule, Executor::Sequential).unwrap();
        assert_eq!(rows[0].sigma_w, None);
        assert!(rows[0].warning.is_none());
    }
}
