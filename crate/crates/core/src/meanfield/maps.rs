use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::nets::Activation;

/// `g(ν) = σ_w² E[f(√ν Z)²] + σ_b²`.
pub fn variance_map(nu: f64, sigma_w: f64, sigma_b: f64, activation: Activation, rule: &QuadratureRule) -> f64 {
    let sb2 = sigma_b * sigma_b;
    if sigma_w == 0.0 {
        return sb2;
    }
    let root = nu.max(0.0).sqrt();
    let second_moment = rule.expect_affine(0.0, root, activation.saturation(), |u| {
        let f = activation.apply(u);
        f * f
    });
    sigma_w * sigma_w * second_moment + sb2
}

/// `h(ν, c) = σ_w² E[f(u₁) f(u₂)] + σ_b²` where `(u₁, u₂)` are centred
/// Gaussians with variance `ν` and covariance `c`, written as
/// `u₁ = √ν z₁`, `u₂ = √ν (ρ z₁ + √(1−ρ²) z₂)` with `ρ = c/ν`.
pub fn covariance_map(
    nu: f64,
    c12: f64,
    sigma_w: f64,
    sigma_b: f64,
    activation: Activation,
    rule: &QuadratureRule,
) -> Result<f64> {
    let sb2 = sigma_b * sigma_b;
    if nu < 0.0 {
        return Err(Error::Domain(format!("variance must be non-negative, got {nu}")));
    }
    let slack = 1e-12 * nu.max(f64::MIN_POSITIVE);
    if c12 > nu + slack || c12 < -nu - slack {
        return Err(Error::Domain(format!("covariance {c12} exceeds variance {nu}")));
    }
    if sigma_w == 0.0 {
        return Ok(sb2);
    }
    let root = nu.sqrt();
    if nu == 0.0 {
        let f0 = activation.apply(0.0);
        return Ok(sigma_w * sigma_w * f0 * f0 + sb2);
    }
    let rho = (c12 / nu).clamp(-1.0, 1.0);
    let comp = (1.0 - rho * rho).max(0.0).sqrt();
    let span = activation.saturation();
    let mut total = 0.0;
    rule.for_each_affine(0.0, root, span, |z1, w1| {
        let f1 = activation.apply(root * z1);
        let inner = rule.expect_affine(root * rho * z1, root * comp, span, |u| activation.apply(u));
        total += w1 * f1 * inner;
    });
    Ok(sigma_w * sigma_w * total + sb2)
}
