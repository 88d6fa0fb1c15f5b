use std::borrow::Cow;
use std::sync::Arc;

use num_complex::Complex64;

use super::dft::FftPlans;
use super::topology::{TopologyConfig, TopologyKind};
use crate::par;
use crate::rng::{fill_gaussian, gaussian_stream, unit_circle_stream, StreamKey, StreamKind};

/// Gain applied after the real-part projection of a structured transform.
///
/// Taking `Re` of a unitary image keeps only half of the energy on average,
/// so without it the effective weight variance would be `1/(2N)` instead of
/// the `1/N` shared by the dense and convolutional layers.
pub const STRUCTURED_GAIN: f64 = std::f64::consts::SQRT_2;

/// Unscaled randomness of one layer. Contains no `σ_w`/`σ_b` factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDraws {
    /// Row-major `N×N`, entries `N(0, 1/N)`. Empty unless MLP.
    pub weights: Vec<f64>,
    /// Length `K`, entries `N(0, 1/K)`. Empty unless Conv.
    pub kernel: Vec<f64>,
    /// `diagonal_stages` unit-modulus vectors of length `N`. Empty unless Structured.
    pub diagonals: Vec<Vec<Complex64>>,
    /// Length `N`, entries `N(0, 1)`.
    pub bias: Vec<f64>,
}

const WEIGHT_CHUNK: usize = 1 << 16;

impl LayerDraws {
    pub fn generate(master_seed: u64, layer: u64, cfg: &TopologyConfig) -> Self {
        let n = cfg.width;
        let key = StreamKey::new(master_seed, layer, StreamKind::Bias);
        let bias = gaussian_stream(key, n);
        let mut draws = Self { weights: Vec::new(), kernel: Vec::new(), diagonals: Vec::new(), bias };
        match cfg.kind {
            TopologyKind::Mlp => {
                let mut w = vec![0.0; n * n];
                let scale = 1.0 / (n as f64).sqrt();
                let wkey = key.with_kind(StreamKind::Weights);
                par::for_each_chunk_mut(&mut w, WEIGHT_CHUNK, |chunk_idx, chunk| {
                    fill_gaussian(wkey, (chunk_idx * WEIGHT_CHUNK) as u64, chunk);
                    chunk.iter_mut().for_each(|v| *v *= scale);
                });
                draws.weights = w;
            }
            TopologyKind::Conv => {
                let k = cfg.kernel_size;
                let scale = 1.0 / (k as f64).sqrt();
                draws.kernel =
                    gaussian_stream(key.with_kind(StreamKind::Kernel), k).into_iter().map(|v| v * scale).collect();
            }
            TopologyKind::Structured => {
                let all = unit_circle_stream(key.with_kind(StreamKind::Diagonal), n * cfg.diagonal_stages);
                draws.diagonals = all.chunks(n).map(<[Complex64]>::to_vec).collect();
            }
        }
        draws
    }
}

/// The linear part of a layer in the form the propagation kernels consume.
#[derive(Debug, Clone)]
pub enum LinearOp {
    Dense(Vec<f64>),
    /// Unnormalized DFT of the zero-extended kernel, divided by `N`, so that
    /// `h ⊛ x = IFFT(FFT(x) ⊙ spectrum)` with raw transforms.
    Spectral(Vec<Complex64>),
    Structured {
        diagonals: Vec<Vec<Complex64>>,
        final_fourier: bool,
    },
}

#[derive(Debug, Clone)]
pub struct PreparedLayer {
    pub op: LinearOp,
    pub bias: Vec<f64>,
}

impl PreparedLayer {
    pub fn from_draws(draws: LayerDraws, cfg: &TopologyConfig, plans: Option<&FftPlans>) -> Self {
        let op = match cfg.kind {
            TopologyKind::Mlp => LinearOp::Dense(draws.weights),
            TopologyKind::Conv => {
                let n = cfg.width;
                let mut spec = vec![Complex64::new(0.0, 0.0); n];
                for (s, h) in spec.iter_mut().zip(&draws.kernel) {
                    s.re = *h;
                }
                let owned;
                let plans = match plans {
                    Some(p) => p,
                    None => {
                        owned = FftPlans::new(n);
                        &owned
                    }
                };
                plans.forward.process(&mut spec);
                let inv_n = 1.0 / n as f64;
                spec.iter_mut().for_each(|v| *v *= inv_n);
                LinearOp::Spectral(spec)
            }
            TopologyKind::Structured => {
                LinearOp::Structured { diagonals: draws.diagonals, final_fourier: cfg.final_fourier }
            }
        };
        Self { op, bias: draws.bias }
    }

    pub fn generate(master_seed: u64, layer: u64, cfg: &TopologyConfig, plans: Option<&FftPlans>) -> Self {
        Self::from_draws(LayerDraws::generate(master_seed, layer, cfg), cfg, plans)
    }
}

/// Bytes needed to hold the prepared draws of one layer.
pub fn layer_bytes(cfg: &TopologyConfig) -> usize {
    let n = cfg.width;
    let linear = match cfg.kind {
        TopologyKind::Mlp => n * n * 8,
        TopologyKind::Conv => n * 16,
        TopologyKind::Structured => n * 16 * cfg.diagonal_stages,
    };
    linear + n * 8
}

/// Supplies the prepared layers `1..=depth` of one network realization,
/// either from a shared cache or by regenerating them on request. Both paths
/// yield identical values.
#[derive(Debug, Clone)]
pub struct LayerSource {
    cfg: TopologyConfig,
    master_seed: u64,
    depth: usize,
    plans: Option<FftPlans>,
    cache: Option<Arc<Vec<PreparedLayer>>>,
}

impl LayerSource {
    /// Caches all layers when they fit in `mem_budget` bytes.
    pub fn new(cfg: TopologyConfig, master_seed: u64, depth: usize, mem_budget: usize) -> Self {
        let plans = (cfg.kind == TopologyKind::Conv).then(|| FftPlans::new(cfg.width));
        let mut source = Self { cfg, master_seed, depth, plans, cache: None };
        let total = layer_bytes(&cfg).saturating_mul(depth);
        if total <= mem_budget {
            let layers = (1..=depth).map(|d| source.build(d)).collect();
            source.cache = Some(Arc::new(layers));
        }
        source
    }

    pub fn regenerating(cfg: TopologyConfig, master_seed: u64, depth: usize) -> Self {
        Self::new(cfg, master_seed, depth, 0)
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn config(&self) -> &TopologyConfig {
        &self.cfg
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    fn build(&self, layer: usize) -> PreparedLayer {
        PreparedLayer::generate(self.master_seed, layer as u64, &self.cfg, self.plans.as_ref())
    }

    /// Layer `d`, 1-based.
    pub fn layer(&self, layer: usize) -> Cow<'_, PreparedLayer> {
        debug_assert!(layer >= 1 && layer <= self.depth);
        match &self.cache {
            Some(layers) => Cow::Borrowed(&layers[layer - 1]),
            None => Cow::Owned(self.build(layer)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_seed_and_layer() {
        for cfg in [TopologyConfig::mlp(8), TopologyConfig::conv(8, 3), TopologyConfig::fdfd(8)] {
            let a = LayerDraws::generate(1, 4, &cfg);
            let b = LayerDraws::generate(1, 4, &cfg);
            assert_eq!(a, b);
            assert_ne!(a, LayerDraws::generate(1, 5, &cfg));
            assert_ne!(a, LayerDraws::generate(2, 4, &cfg));
        }
    }

    #[test]
    fn draw_shapes_follow_topology() {
        let mlp = LayerDraws::generate(0, 1, &TopologyConfig::mlp(6));
        assert_eq!(mlp.weights.len(), 36);
        assert!(mlp.kernel.is_empty() && mlp.diagonals.is_empty());
        let conv = LayerDraws::generate(0, 1, &TopologyConfig::conv(6, 4));
        assert_eq!(conv.kernel.len(), 4);
        let fdfd = LayerDraws::generate(0, 1, &TopologyConfig::fdfd(6));
        assert_eq!(fdfd.diagonals.len(), 2);
        assert!(fdfd.diagonals.iter().flatten().all(|d| (d.norm() - 1.0).abs() < 1e-12));
        assert_eq!(fdfd.bias.len(), 6);
    }

    #[test]
    fn weight_variance_is_one_over_width() {
        let n = 300;
        let d = LayerDraws::generate(9, 2, &TopologyConfig::mlp(n));
        let var = d.weights.iter().map(|w| w * w).sum::<f64>() / d.weights.len() as f64;
        assert!((var * n as f64 - 1.0).abs() < 0.01, "{}", var * n as f64);
    }

    #[test]
    fn cached_and_regenerated_layers_agree() {
        for cfg in [TopologyConfig::mlp(8), TopologyConfig::conv(8, 8), TopologyConfig::fdf(8)] {
            let cached = LayerSource::new(cfg, 3, 5, usize::MAX);
            let regen = LayerSource::regenerating(cfg, 3, 5);
            assert!(cached.is_cached() && !regen.is_cached());
            for d in 1..=5 {
                let (a, b) = (cached.layer(d), regen.layer(d));
                assert_eq!(a.bias, b.bias);
                assert_eq!(format!("{:?}", a.op), format!("{:?}", b.op));
            }
        }
    }
}
