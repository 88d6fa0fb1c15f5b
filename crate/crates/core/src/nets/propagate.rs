use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dft::FftPlans;
use super::draws::{LayerSource, LinearOp, PreparedLayer, STRUCTURED_GAIN};
use super::kernels::{dense_apply, spectral_apply_pair, structured_apply};
use super::topology::{TopologyConfig, TopologyKind};
use crate::error::{Error, Result};
use crate::rng::{gaussian_stream, StreamKey, StreamKind};

/// How the second input of a pair is formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum InputMode {
    Independent,
    /// `i₂ = normalize(i₁ + ε·g)` with `g` a unit-norm draw.
    Perturbed {
        epsilon: f64,
    },
}

impl InputMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InputMode::Perturbed { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                Err(Error::Config(format!("perturbation must be positive, got {epsilon}")))
            }
            _ => Ok(()),
        }
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// The two unit-norm inputs shared by every cell of a landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInputs {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl PairInputs {
    pub fn generate(master_seed: u64, width: usize, mode: InputMode) -> Result<Self> {
        mode.validate()?;
        let key = StreamKey::new(master_seed, 0, StreamKind::Input1);
        let first = normalized(gaussian_stream(key, width));
        let second = match mode {
            InputMode::Independent => normalized(gaussian_stream(key.with_kind(StreamKind::Input2), width)),
            InputMode::Perturbed { epsilon } => {
                let g = normalized(gaussian_stream(key.with_kind(StreamKind::Perturbation), width));
                normalized(first.iter().zip(&g).map(|(a, b)| a + epsilon * b).collect())
            }
        };
        Ok(Self { first, second })
    }
}

/// Per-depth divergence of one input pair.
///
/// `divergences[d - 1]` is `‖z₁⁽ᵈ⁾ − z₂⁽ᵈ⁾‖² / N`, the per-neuron squared
/// distance, which is the quantity the mean-field value `2(ν − c₁₂)` tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTrace {
    pub divergences: Vec<f64>,
}

impl PairTrace {
    pub fn depth(&self) -> usize {
        self.divergences.len()
    }

    /// Mean over the last `count` layers.
    pub fn tail_mean(&self, count: usize) -> f64 {
        let count = count.clamp(1, self.divergences.len());
        let tail = &self.divergences[self.divergences.len() - count..];
        tail.iter().sum::<f64>() / count as f64
    }
}

/// State of many cells that share one network realization and one input
/// pair but differ in `(σ_w, σ_b)`. Trajectory `2c` and `2c + 1` belong to
/// cell `c`.
pub struct PairBatch {
    cfg: TopologyConfig,
    points: Vec<(f64, f64)>,
    x: Vec<f64>,
    y: Vec<f64>,
    merged: Vec<bool>,
    active: Vec<usize>,
    plans: Option<FftPlans>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    layer: usize,
}

impl PairBatch {
    pub fn new(cfg: TopologyConfig, points: &[(f64, f64)], inputs: &PairInputs) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.width;
        for v in [&inputs.first, &inputs.second] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: v.len() });
            }
        }
        let mut x = Vec::with_capacity(2 * n * points.len());
        for _ in points {
            x.extend_from_slice(&inputs.first);
            x.extend_from_slice(&inputs.second);
        }
        let plans = (cfg.kind != TopologyKind::Mlp).then(|| FftPlans::new(n));
        let scratch_len = plans.as_ref().map_or(0, FftPlans::scratch_len);
        let mut batch = Self {
            cfg,
            points: points.to_vec(),
            y: vec![0.0; x.len()],
            x,
            merged: vec![false; points.len()],
            active: Vec::with_capacity(2 * points.len()),
            plans,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            layer: 0,
        };
        batch.refresh_merged();
        Ok(batch)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Convolution packs both trajectories of a cell into one complex
    /// transform, so identical trajectories are not guaranteed to stay
    /// bitwise identical and are never merged.
    fn refresh_merged(&mut self) {
        if self.cfg.kind == TopologyKind::Conv {
            return;
        }
        let n = self.cfg.width;
        for (c, m) in self.merged.iter_mut().enumerate() {
            if !*m {
                let pair = &self.x[2 * c * n..(2 * c + 2) * n];
                let (a, b) = pair.split_at(n);
                *m = a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits());
            }
        }
    }

    /// Advances every cell by one layer and writes the per-neuron divergence
    /// of each cell into `out`.
    pub fn step(&mut self, layer: &PreparedLayer, out: &mut [f64]) -> Result<()> {
        let n = self.cfg.width;
        self.layer += 1;
        self.active.clear();
        for (c, &m) in self.merged.iter().enumerate() {
            self.active.push(2 * c);
            if !m {
                self.active.push(2 * c + 1);
            }
        }
        match &layer.op {
            LinearOp::Dense(w) => dense_apply(w, n, &self.x, &mut self.y, &self.active),
            LinearOp::Spectral(spec) => {
                let plans = self.plans.as_ref().expect("spectral layer needs transform plans");
                for c in 0..self.points.len() {
                    let (x1, x2) = self.x[2 * c * n..(2 * c + 2) * n].split_at(n);
                    let (y1, y2) = self.y[2 * c * n..(2 * c + 2) * n].split_at_mut(n);
                    spectral_apply_pair(spec, plans, x1, x2, y1, y2, &mut self.buf, &mut self.scratch);
                }
            }
            LinearOp::Structured { diagonals, final_fourier } => {
                let plans = self.plans.as_ref().expect("structured layer needs transform plans");
                for &t in &self.active {
                    structured_apply(
                        diagonals,
                        *final_fourier,
                        plans,
                        &self.x[t * n..(t + 1) * n],
                        &mut self.y[t * n..(t + 1) * n],
                        &mut self.buf,
                        &mut self.scratch,
                        STRUCTURED_GAIN,
                    );
                }
            }
        }

        let activation = self.cfg.activation;
        let bias = &layer.bias;
        let inv_n = 1.0 / n as f64;
        for (c, &(sw, sb)) in self.points.iter().enumerate() {
            let (y1, y2) = self.y[2 * c * n..(2 * c + 2) * n].split_at_mut(n);
            let (x1, x2) = self.x[2 * c * n..(2 * c + 2) * n].split_at_mut(n);
            for ((z, &b), x) in y1.iter_mut().zip(bias).zip(x1.iter_mut()) {
                *z = sw * *z + sb * b;
                *x = activation.apply(*z);
            }
            if self.merged[c] {
                x2.copy_from_slice(x1);
                out[c] = 0.0;
                continue;
            }
            let mut sum = 0.0;
            for (((z, &b), x), &z1) in y2.iter_mut().zip(bias).zip(x2.iter_mut()).zip(y1.iter()) {
                *z = sw * *z + sb * b;
                *x = activation.apply(*z);
                let d = z1 - *z;
                sum += d * d;
            }
            let l = sum * inv_n;
            if !l.is_finite() {
                return Err(Error::NonFinite { depth: self.layer });
            }
            out[c] = l;
        }
        self.refresh_merged();
        Ok(())
    }
}

/// Runs the cells in `points` through all layers of `source`, calling
/// `record(d, divergences)` after every layer `d` (1-based).
pub fn run_cells(
    source: &LayerSource,
    inputs: &PairInputs,
    points: &[(f64, f64)],
    mut record: impl FnMut(usize, &[f64]),
) -> Result<()> {
    let mut batch = PairBatch::new(*source.config(), points, inputs)?;
    let mut out = vec![0.0; points.len()];
    for d in 1..=source.depth() {
        batch.step(&source.layer(d), &mut out)?;
        record(d, &out);
    }
    Ok(())
}

/// Propagates one input pair through `depth` layers and returns the
/// divergence at every depth.
pub fn propagate_pair(
    cfg: &TopologyConfig,
    sigma_w: f64,
    sigma_b: f64,
    depth: usize,
    master_seed: u64,
    input_mode: InputMode,
) -> Result<PairTrace> {
    if depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    cfg.validate()?;
    let inputs = PairInputs::generate(master_seed, cfg.width, input_mode)?;
    let source = LayerSource::regenerating(*cfg, master_seed, depth);
    let mut divergences = Vec::with_capacity(depth);
    run_cells(&source, &inputs, &[(sigma_w, sigma_b)], |_, l| divergences.push(l[0]))?;
    Ok(PairTrace { divergences })
}
