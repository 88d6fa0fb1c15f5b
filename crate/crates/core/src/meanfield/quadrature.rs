use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 128;

/// Standard normal mass outside `±Z_MAX` is below 1e-16.
const Z_MAX: f64 = 8.5;
/// Panels per unit of argument is `PANEL_DENSITY / nodes-per-panel`.
const PANEL_DENSITY: f64 = 16.0 / 3.0;

/// Quadrature against the standard normal weight.
///
/// `nodes`/`weights` hold the Gauss-Hermite rule of the given order, rescaled
/// so that `Σ wᵢ f(zᵢ) ≈ E[f(Z)]`. The affine expectations used by the
/// mean-field maps go through a composite Gauss-Legendre rule with
/// `order / 8` nodes per panel instead: for large variances `f(√ν z)` is too
/// steep for a global polynomial rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
    panel_nodes: Vec<f64>,
    panel_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order < 16 {
            return Err(Error::Config(format!("quadrature order must be at least 16, got {order}")));
        }
        let rule = GaussHermite::new(order).map_err(|e| Error::Config(format!("quadrature order {order}: {e}")))?;
        let scale = std::f64::consts::SQRT_2;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> =
            rule.nodes().zip(rule.weights()).map(|(&x, &w)| (x * scale, w * inv_sqrt_pi)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();

        let panel =
            GaussLegendre::new(order / 8).map_err(|e| Error::Config(format!("panel rule for order {order}: {e}")))?;
        let mut pairs: Vec<(f64, f64)> = panel.nodes().zip(panel.weights()).map(|(&x, &w)| (x, w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (panel_nodes, panel_weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights, order, panel_nodes, panel_weights })
    }

    /// `E[f(Z)]` with the Gauss-Hermite rule; accurate for smooth, slowly
    /// varying `f`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }

    /// Visits `(z, w)` so that `Σ w g(offset + scale·z) ≈ E[g(offset + scale·Z)]`
    /// for `g` that varies on unit scale inside `|u| < span` and is flat outside.
    pub fn for_each_affine(&self, offset: f64, scale: f64, span: f64, mut visit: impl FnMut(f64, f64)) {
        if scale == 0.0 {
            visit(0.0, 1.0);
            return;
        }
        let scale = scale.abs();
        let coarse = self.panel_nodes.len() as f64 / PANEL_DENSITY;
        let fine = coarse / scale.max(1.0);
        let a = ((-span - offset) / scale).clamp(-Z_MAX, Z_MAX);
        let b = ((span - offset) / scale).clamp(a, Z_MAX);
        self.panels(-Z_MAX, a, coarse, &mut visit);
        self.panels(a, b, fine, &mut visit);
        self.panels(b, Z_MAX, coarse, &mut visit);
    }

    fn panels(&self, lo: f64, hi: f64, width: f64, visit: &mut impl FnMut(f64, f64)) {
        let len = hi - lo;
        if len <= 0.0 {
            return;
        }
        let count = (len / width).ceil().max(1.0) as usize;
        let h = len / count as f64;
        let norm = 0.5 * h * (2.0 * std::f64::consts::PI).sqrt().recip();
        for i in 0..count {
            let mid = lo + (i as f64 + 0.5) * h;
            for (&x, &w) in self.panel_nodes.iter().zip(&self.panel_weights) {
                let z = mid + 0.5 * h * x;
                visit(z, norm * w * (-0.5 * z * z).exp());
            }
        }
    }

    /// `E[g(offset + scale·Z)]`, see [`Self::for_each_affine`].
    pub fn expect_affine(&self, offset: f64, scale: f64, span: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each_affine(offset, scale, span, |z, w| total += w * g(offset + scale * z));
        total
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_hermite(DEFAULT_ORDER).expect("default quadrature order is valid")
    }
}
