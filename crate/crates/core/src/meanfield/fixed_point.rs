use serde::{Deserialize, Serialize};

use super::maps::{covariance_map, variance_map};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::nets::Activation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000 }
    }
}

/// Iterates `x ← map(x)` until `|map(x) − x| ≤ tol`.
///
/// Steps are halved while the residual keeps flipping sign. When progress is
/// slow the iterate is extrapolated with Aitken's Δ², and the jump is kept
/// only if it lands on the same side of the fixed point as the current
/// iterate, so a monotone sequence cannot skip over the fixed point it is
/// approaching.
fn iterate(
    start: f64,
    lower: f64,
    upper: f64,
    opts: SolverOptions,
    mut map: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut x = start.clamp(lower, upper);
    let mut prev_residual = 0.0f64;
    let mut history = [f64::NAN; 3];
    let mut since_jump = 0usize;
    for iter in 0..opts.max_iter {
        let mapped = map(x)?;
        let residual = mapped - x;
        if residual.abs() <= opts.tol {
            return Ok(mapped.clamp(lower, upper));
        }
        let oscillating = prev_residual != 0.0 && residual.signum() != prev_residual.signum();
        let next = if oscillating { x + 0.5 * residual } else { mapped };
        prev_residual = residual;

        history = [history[1], history[2], x];
        since_jump += 1;
        x = next.clamp(lower, upper);

        if !oscillating && since_jump >= 3 && iter >= 8 {
            let [x0, x1, x2] = [history[1], history[2], x];
            let d1 = x1 - x0;
            let d2 = x2 - x1;
            let denom = d2 - d1;
            if d1 != 0.0 && (d2 / d1).abs() > 0.5 && denom != 0.0 {
                let jump = x0 - d1 * d1 / denom;
                if jump.is_finite() && jump >= lower && jump <= upper {
                    let side = map(jump)? - jump;
                    if side.abs() <= opts.tol {
                        return Ok(jump);
                    }
                    if side.signum() == residual.signum() {
                        x = jump;
                        prev_residual = 0.0;
                    }
                }
                since_jump = 0;
            }
        }
    }
    let last = map(x)?;
    Err(Error::NoConvergence { iterations: opts.max_iter, last: x, residual: (last - x).abs() })
}

/// Fixed point `ν*` of the variance map, iterated from `σ_w² + σ_b²`.
pub fn fixed_point_variance(
    sigma_w: f64,
    sigma_b: f64,
    activation: Activation,
    rule: &QuadratureRule,
    opts: SolverOptions,
) -> Result<f64> {
    let start = sigma_w * sigma_w + sigma_b * sigma_b;
    iterate(start, 0.0, f64::INFINITY, opts, |nu| Ok(variance_map(nu, sigma_w, sigma_b, activation, rule)))
}

/// Smallest fixed point `c*` of `c ↦ h(ν*, c)`, iterated upward from 0.
pub fn fixed_point_covariance(
    nu_star: f64,
    sigma_w: f64,
    sigma_b: f64,
    activation: Activation,
    rule: &QuadratureRule,
    opts: SolverOptions,
) -> Result<f64> {
    if nu_star < 0.0 {
        return Err(Error::Domain(format!("variance must be non-negative, got {nu_star}")));
    }
    iterate(0.0, 0.0, nu_star, opts, |c| covariance_map(nu_star, c, sigma_w, sigma_b, activation, rule))
}

/// Asymptotic mean-field state at one `(σ_w, σ_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldPoint {
    pub sigma_w: f64,
    pub sigma_b: f64,
    pub nu: f64,
    pub c12: f64,
    /// `2(ν* − c*)`, clamped at zero.
    pub divergence: f64,
}

pub fn mean_field_point(
    sigma_w: f64,
    sigma_b: f64,
    activation: Activation,
    rule: &QuadratureRule,
    opts: SolverOptions,
) -> Result<MeanFieldPoint> {
    let nu = fixed_point_variance(sigma_w, sigma_b, activation, rule, opts)?;
    let c12 = fixed_point_covariance(nu, sigma_w, sigma_b, activation, rule, opts)?;
    Ok(MeanFieldPoint { sigma_w, sigma_b, nu, c12, divergence: (2.0 * (nu - c12)).max(0.0) })
}

/// `L* = 2(ν* − c*)`.
pub fn mean_field_divergence(
    sigma_w: f64,
    sigma_b: f64,
    activation: Activation,
    rule: &QuadratureRule,
    opts: SolverOptions,
) -> Result<f64> {
    mean_field_point(sigma_w, sigma_b, activation, rule, opts).map(|p| p.divergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_g(nu: f64, sw: f64, sb: f64) -> f64 {
        sw * sw * 2.0 / std::f64::consts::PI * (2.0 * nu / (1.0 + 2.0 * nu)).asin() + sb * sb
    }

    fn closed_h(nu: f64, c: f64, sw: f64, sb: f64) -> f64 {
        sw * sw * 2.0 / std::f64::consts::PI * (2.0 * c / (1.0 + 2.0 * nu)).asin() + sb * sb
    }

    /// Long plain iteration of the closed-form erf maps.
    fn direct_iteration(sw: f64, sb: f64) -> (f64, f64) {
        let mut nu = sw * sw + sb * sb;
        for _ in 0..10_000 {
            nu = closed_g(nu, sw, sb);
        }
        let mut c = 0.0;
        for _ in 0..10_000 {
            c = closed_h(nu, c, sw, sb);
        }
        (nu, c)
    }

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn constant_map_when_weights_vanish() {
        let opts = SolverOptions::default();
        let nu = fixed_point_variance(0.0, 0.7, Activation::Erf, &rule(), opts).unwrap();
        assert!((nu - 0.49).abs() <= opts.tol);
        let c = fixed_point_covariance(nu, 0.0, 0.7, Activation::Erf, &rule(), opts).unwrap();
        assert!((c - nu).abs() <= opts.tol);
        assert_eq!(mean_field_divergence(0.0, 1.3, Activation::Erf, &rule(), opts).unwrap(), 0.0);
    }

    #[test]
    fn contractive_regime_collapses_variance() {
        let opts = SolverOptions::default();
        let nu = fixed_point_variance(0.1, 0.0, Activation::Erf, &rule(), opts).unwrap();
        assert!(nu.abs() <= opts.tol);
    }

    #[test]
    fn variance_matches_direct_iteration() {
        let opts = SolverOptions::default();
        let nu = fixed_point_variance(2.0, 1.0, Activation::Erf, &rule(), opts).unwrap();
        let (oracle, _) = direct_iteration(2.0, 1.0);
        assert!((nu - oracle).abs() < 1e-3, "{nu} vs {oracle}");
        assert!((nu - oracle).abs() < 1e-8);
    }

    #[test]
    fn ordered_phase_has_equal_fixed_points() {
        let opts = SolverOptions::default();
        let p = mean_field_point(0.5, 0.1, Activation::Erf, &rule(), opts).unwrap();
        assert!((p.c12 - p.nu).abs() <= 10.0 * opts.tol);
        assert!(p.divergence < 1e-8);
    }

    #[test]
    fn chaotic_phase_separates_fixed_points() {
        let opts = SolverOptions::default();
        let p = mean_field_point(3.0, 0.1, Activation::Erf, &rule(), opts).unwrap();
        assert!(p.c12 < p.nu - 10.0 * opts.tol);
        let (nu, c) = direct_iteration(3.0, 0.1);
        assert!((p.divergence - 2.0 * (nu - c)).abs() < 1e-3);
    }

    #[test]
    fn edge_of_chaos_near_one_point_six_at_unit_bias() {
        let opts = SolverOptions::default();
        let l = |sw| mean_field_divergence(sw, 1.0, Activation::Erf, &rule(), opts).unwrap();
        assert!(l(1.4) < 1e-6);
        assert!(l(1.9) > 0.01);
    }

    #[test]
    fn converges_close_to_the_critical_line() {
        // critical σ_w at σ_b = 1 is ≈ 1.64; iteration there is sub-linear
        let opts = SolverOptions::default();
        for sw in [1.62, 1.635, 1.64, 1.645, 1.66] {
            let p = mean_field_point(sw, 1.0, Activation::Erf, &rule(), opts).unwrap();
            let (nu, c) = direct_iteration(sw, 1.0);
            assert!((p.nu - nu).abs() < 1e-8);
            assert!((p.divergence - 2.0 * (nu - c)).abs() < 1e-3, "sw={sw}: {} vs {}", p.divergence, 2.0 * (nu - c));
        }
    }

    #[test]
    fn reports_non_convergence() {
        let opts = SolverOptions { tol: 1e-14, max_iter: 3 };
        let err = fixed_point_variance(2.0, 1.0, Activation::Erf, &rule(), opts).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 3, .. }));
    }
}
