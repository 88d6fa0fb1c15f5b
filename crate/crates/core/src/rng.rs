//! Counter-based random streams.
//!
//! Every stream is addressed by a [`StreamKey`]. The generator behind a key is
//! ChaCha8 seeded from the master seed, with the ChaCha stream id carrying the
//! layer index and stream kind, and the block counter acting as the element
//! index. Values can therefore be regenerated at any offset without replaying
//! earlier draws, and a shorter request is always a prefix of a longer one.
//!
//! Gaussian conversion is fixed to the Box-Muller pair transform: element `2p`
//! is `r cos(θ)` and element `2p + 1` is `r sin(θ)` where `r = sqrt(-2 ln u1)`,
//! `θ = 2π u2`, and `(u1, u2)` come from the `p`-th pair of 64-bit words.
//! Transcendentals go through `libm` so the bits do not depend on the host C
//! library.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const SEED_TAG: &[u8; 8] = b"phasefrt";
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamKind {
    Weights,
    Bias,
    Kernel,
    Diagonal,
    Input1,
    Input2,
    Perturbation,
}

impl StreamKind {
    fn code(self) -> u64 {
        match self {
            StreamKind::Weights => 0,
            StreamKind::Bias => 1,
            StreamKind::Kernel => 2,
            StreamKind::Diagonal => 3,
            StreamKind::Input1 => 4,
            StreamKind::Input2 => 5,
            StreamKind::Perturbation => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub layer_index: u64,
    pub kind: StreamKind,
}

impl StreamKey {
    pub fn new(master_seed: u64, layer_index: u64, kind: StreamKind) -> Self {
        Self { master_seed, layer_index, kind }
    }

    /// Same layer and seed, different stream kind.
    pub fn with_kind(self, kind: StreamKind) -> Self {
        Self { kind, ..self }
    }

    /// Layer indices above 2^60 wrap into the low bits; the top bits of the
    /// ChaCha stream id hold the kind.
    fn stream_id(&self) -> u64 {
        (self.layer_index & ((1 << 60) - 1)) | (self.kind.code() << 60)
    }

    fn generator(&self, word_offset: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..16].copy_from_slice(SEED_TAG);
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.stream_id());
        // word positions are in 32-bit units
        rng.set_word_pos(u128::from(word_offset) * 2);
        rng
    }
}

/// Uniform on (0, 1].
#[inline]
fn open_unit(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * INV_2_53
}

/// Uniform on [0, 1).
#[inline]
fn half_open_unit(word: u64) -> f64 {
    (word >> 11) as f64 * INV_2_53
}

#[inline]
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = open_unit(rng.next_u64());
    let u2 = half_open_unit(rng.next_u64());
    let r = (-2.0 * libm::log(u1)).sqrt();
    let (s, c) = libm::sincos(TWO_PI * u2);
    (r * c, r * s)
}

/// Standard normal draws for `key`, elements `0..count`.
pub fn gaussian_stream(key: StreamKey, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    fill_gaussian(key, 0, &mut out);
    out
}

/// Writes elements `offset..offset + out.len()` of the gaussian stream.
pub fn fill_gaussian(key: StreamKey, offset: u64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut rng = key.generator((offset / 2) * 2);
    let mut idx = 0;
    if offset % 2 == 1 {
        let (_, s) = box_muller(&mut rng);
        out[0] = s;
        idx = 1;
    }
    while idx + 1 < out.len() {
        let (c, s) = box_muller(&mut rng);
        out[idx] = c;
        out[idx + 1] = s;
        idx += 2;
    }
    if idx < out.len() {
        out[idx] = box_muller(&mut rng).0;
    }
}

/// Unit-modulus complex draws with uniform phase, elements `0..count`.
pub fn unit_circle_stream(key: StreamKey, count: usize) -> Vec<Complex64> {
    let mut rng = key.generator(0);
    (0..count)
        .map(|_| {
            let (s, c) = libm::sincos(TWO_PI * half_open_unit(rng.next_u64()));
            Complex64::new(c, s)
        })
        .collect()
}
