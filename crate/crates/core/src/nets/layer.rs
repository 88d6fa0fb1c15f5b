use num_complex::Complex64;

use super::dft::{dft_unitary, FftPlans};
use super::draws::{LayerDraws, LinearOp, PreparedLayer, STRUCTURED_GAIN};
use super::kernels::{dense_apply, spectral_apply_pair, structured_apply};
use super::topology::{TopologyConfig, TopologyKind};
use crate::error::{Error, Result};

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Circular convolution through the unitary transform:
/// `h ⊛ x = F^H diag(sqrt(N) F h) F x`, with `h` zero-extended to `N`.
pub fn circular_convolve_fft(kernel: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for (slot, v) in h.iter_mut().zip(kernel) {
        slot.re = *v;
    }
    let root_n = (n as f64).sqrt();
    let h_spec = dft_unitary(&h, false);
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut prod = dft_unitary(&xc, false);
    for (p, s) in prod.iter_mut().zip(&h_spec) {
        *p *= s * root_n;
    }
    dft_unitary(&prod, true).into_iter().map(|c| c.re).collect()
}

/// Convolves two signals with the same kernel through the packed path the
/// batched propagation uses (prepared spectrum, one complex transform for
/// both signals).
pub fn circular_convolve_pair(kernel: &[f64], x1: &[f64], x2: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x1.len();
    check_len(n, x2.len())?;
    if kernel.is_empty() || kernel.len() > n {
        return Err(Error::Config(format!("kernel size must be in 1..={n}, got {}", kernel.len())));
    }
    let cfg = TopologyConfig::conv(n, kernel.len());
    let draws = LayerDraws { weights: Vec::new(), kernel: kernel.to_vec(), diagonals: Vec::new(), bias: vec![0.0; n] };
    let plans = FftPlans::new(n);
    let LinearOp::Spectral(spectrum) = PreparedLayer::from_draws(draws, &cfg, Some(&plans)).op else {
        unreachable!("conv layers prepare a spectrum")
    };
    let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); plans.scratch_len()];
    spectral_apply_pair(&spectrum, &plans, x1, x2, &mut y1, &mut y2, &mut buf, &mut scratch);
    Ok((y1, y2))
}

/// One layer: returns the pre-activation `z = σ_w·(W x) + σ_b·b` and the
/// activation `f(z)`.
pub fn forward_layer(
    x: &[f64],
    draws: &LayerDraws,
    sigma_w: f64,
    sigma_b: f64,
    cfg: &TopologyConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = cfg.width;
    check_len(n, x.len())?;
    check_len(n, draws.bias.len())?;
    let linear = match cfg.kind {
        TopologyKind::Mlp => {
            check_len(n * n, draws.weights.len())?;
            let mut y = vec![0.0; n];
            dense_apply(&draws.weights, n, x, &mut y, &[0]);
            y
        }
        TopologyKind::Conv => {
            if draws.kernel.is_empty() || draws.kernel.len() > n {
                return Err(Error::Config(format!("kernel of length {} does not fit width {n}", draws.kernel.len())));
            }
            circular_convolve_fft(&draws.kernel, x)
        }
        TopologyKind::Structured => {
            check_len(cfg.diagonal_stages, draws.diagonals.len())?;
            for d in &draws.diagonals {
                check_len(n, d.len())?;
            }
            let plans = FftPlans::new(n);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plans.scratch_len()];
            let mut y = vec![0.0; n];
            structured_apply(
                &draws.diagonals,
                cfg.final_fourier,
                &plans,
                x,
                &mut y,
                &mut buf,
                &mut scratch,
                STRUCTURED_GAIN,
            );
            y
        }
    };
    let z: Vec<f64> = linear.iter().zip(&draws.bias).map(|(&y, &b)| sigma_w * y + sigma_b * b).collect();
    let next = z.iter().map(|&v| cfg.activation.apply(v)).collect();
    Ok((z, next))
}

/// Squared Euclidean distance `‖z1 − z2‖²`.
pub fn divergence(z1: &[f64], z2: &[f64]) -> Result<f64> {
    check_len(z1.len(), z2.len())?;
    Ok(z1.iter().zip(z2).map(|(a, b)| (a - b) * (a - b)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::topology::Activation;
    use proptest::prelude::*;

    fn direct_circular(kernel: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n).map(|i| kernel.iter().enumerate().map(|(k, h)| h * x[(i + n - k) % n]).sum()).collect()
    }

    fn draws_with_kernel(kernel: Vec<f64>, n: usize) -> LayerDraws {
        LayerDraws { weights: vec![], kernel, diagonals: vec![], bias: vec![0.0; n] }
    }

    #[test]
    fn zero_scales_give_zero() {
        for cfg in [TopologyConfig::mlp(8), TopologyConfig::conv(8, 3), TopologyConfig::fdf(8), TopologyConfig::fdfd(8)]
        {
            let draws = LayerDraws::generate(0, 1, &cfg);
            let x: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
            let (z, next) = forward_layer(&x, &draws, 0.0, 0.0, &cfg).unwrap();
            assert!(z.iter().chain(&next).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn impulse_kernel_is_identity() {
        let n = 16;
        let mut h = vec![0.0; n];
        h[0] = 1.0;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.4).cos()).collect();
        let cfg = TopologyConfig::conv(n, n);
        let (z, _) = forward_layer(&x, &draws_with_kernel(h, n), 1.0, 0.0, &cfg).unwrap();
        for (a, b) in z.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn conv_matches_direct_oracle() {
        let (n, k) = (16, 5);
        let cfg = TopologyConfig::conv(n, k);
        let draws = LayerDraws::generate(42, 3, &cfg);
        let x: Vec<f64> =
            crate::rng::gaussian_stream(crate::rng::StreamKey::new(1, 0, crate::rng::StreamKind::Input1), n);
        let (z, _) = forward_layer(&x, &draws, 1.0, 0.0, &cfg).unwrap();
        for (a, b) in z.iter().zip(direct_circular(&draws.kernel, &x)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_diagonal_fdf_reverses_indices() {
        // brute-force unitary DFT matrix applied twice
        let n = 8;
        let f = |j: usize, k: usize| {
            Complex64::from_polar(
                1.0 / (n as f64).sqrt(),
                -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64,
            )
        };
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 1.7).sin() + 0.3).collect();
        let fx: Vec<Complex64> = (0..n).map(|j| (0..n).map(|k| f(j, k) * x[k]).sum()).collect();
        let ffx: Vec<Complex64> = (0..n).map(|j| (0..n).map(|k| f(j, k) * fx[k]).sum()).collect();

        let cfg = TopologyConfig::fdf(n);
        let draws = LayerDraws {
            weights: vec![],
            kernel: vec![],
            diagonals: vec![vec![Complex64::new(1.0, 0.0); n]],
            bias: vec![0.0; n],
        };
        let (z, _) = forward_layer(&x, &draws, 1.0, 0.0, &cfg).unwrap();
        for i in 0..n {
            let expect = STRUCTURED_GAIN * ffx[i].re;
            assert!((z[i] - expect).abs() < 1e-10);
            assert!((z[i] - STRUCTURED_GAIN * x[(n - i) % n]).abs() < 1e-10);
        }
    }

    #[test]
    fn structured_stages_preserve_norm() {
        let n = 32;
        let cfg = TopologyConfig::fdfd(n);
        let draws = LayerDraws::generate(5, 1, &cfg);
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64).sin(), 0.0)).collect();
        let norm0: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for d in draws.diagonals.iter().rev() {
            let dv: Vec<Complex64> = v.iter().zip(d).map(|(a, b)| a * b).collect();
            v = dft_unitary(&dv, false);
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - norm0).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_values() {
        assert_eq!(divergence(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert!(matches!(divergence(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        let z1: Vec<f64> = (0..10).map(|i| (i as f64 * 0.3).sin()).collect();
        let z2: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut naive = 0.0;
        for i in 0..10 {
            naive += (z1[i] - z2[i]).powi(2);
        }
        assert!((divergence(&z1, &z2).unwrap() - naive).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_input() {
        let cfg = TopologyConfig::mlp(4);
        let draws = LayerDraws::generate(0, 1, &cfg);
        assert!(forward_layer(&[0.0; 3], &draws, 1.0, 1.0, &cfg).is_err());
        let other = LayerDraws::generate(0, 1, &TopologyConfig::mlp(5));
        assert!(forward_layer(&[0.0; 4], &other, 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn mlp_preactivations_are_gaussian_with_predicted_variance() {
        // fixed x with ‖x‖² = N, fresh draws per resample
        let n = 64;
        let cfg = TopologyConfig::mlp(n).with_activation(Activation::Erf);
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (sw, sb) = (1.3, 0.6);
        let resamples = 10_000;
        let mut sum_sq = 0.0;
        for r in 0..resamples {
            let draws = LayerDraws::generate(77, r as u64 + 1, &cfg);
            let (z, _) = forward_layer(&x, &draws, sw, sb, &cfg).unwrap();
            sum_sq += z[0] * z[0];
        }
        let var = sum_sq / resamples as f64;
        let expected = sw * sw + sb * sb;
        assert!((var / expected - 1.0).abs() < 0.05, "{var} vs {expected}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn fft_path_equals_direct(n in 1usize..=64, kfrac in 0.0f64..1.0, seed in any::<u64>()) {
            let k = 1 + ((n - 1) as f64 * kfrac) as usize;
            let h = crate::rng::gaussian_stream(crate::rng::StreamKey::new(seed, 1, crate::rng::StreamKind::Kernel), k);
            let x = crate::rng::gaussian_stream(crate::rng::StreamKey::new(seed, 0, crate::rng::StreamKind::Input1), n);
            let fast = circular_convolve_fft(&h, &x);
            for (a, b) in fast.iter().zip(direct_circular(&h, &x)) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn packed_pair_equals_direct(n in 1usize..=64, kfrac in 0.0f64..1.0, seed in any::<u64>()) {
            let k = 1 + ((n - 1) as f64 * kfrac) as usize;
            let h = crate::rng::gaussian_stream(crate::rng::StreamKey::new(seed, 1, crate::rng::StreamKind::Kernel), k);
            let x1 = crate::rng::gaussian_stream(crate::rng::StreamKey::new(seed, 0, crate::rng::StreamKind::Input1), n);
            let x2 = crate::rng::gaussian_stream(crate::rng::StreamKey::new(seed, 0, crate::rng::StreamKind::Input2), n);
            let (y1, y2) = circular_convolve_pair(&h, &x1, &x2).unwrap();
            for (a, b) in y1.iter().zip(direct_circular(&h, &x1)).chain(y2.iter().zip(direct_circular(&h, &x2))) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
