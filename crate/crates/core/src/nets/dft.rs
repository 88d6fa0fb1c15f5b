use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans of one length, unnormalized.
#[derive(Clone)]
pub struct FftPlans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())
    }
}

impl std::fmt::Debug for FftPlans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlans").field("len", &self.len()).finish()
    }
}

/// Unitary DFT, `1/sqrt(N)` in both directions.
pub fn dft_unitary(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut buf = x.to_vec();
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(x.len()) } else { planner.plan_fft_forward(x.len()) };
    plan.process(&mut buf);
    let scale = 1.0 / (x.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}
