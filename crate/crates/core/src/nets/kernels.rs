//! Inner loops shared by the single-pair and batched propagation paths.
//!
//! Every trajectory is reduced in a fixed order that does not depend on how
//! many trajectories are processed together, so a cell computed alone and the
//! same cell computed inside a batch produce identical bits.

use num_complex::Complex64;

use super::dft::FftPlans;

/// Dense products for a block of `L` trajectories, gathered lane-major so
/// that each lane accumulates `Σ_k w_ik x_k` with fused multiply-adds in
/// ascending `k`. The per-lane arithmetic does not depend on `L` or on which
/// other trajectories share the block.
#[inline(always)]
fn dense_block<const L: usize>(
    weights: &[f64],
    n: usize,
    x: &[f64],
    out: &mut [f64],
    traj: &[usize],
    gathered: &mut Vec<f64>,
) {
    const ROWS: usize = 4;
    debug_assert!(traj.len() <= L);
    gathered.clear();
    gathered.resize(n * L, 0.0);
    for (l, &t) in traj.iter().enumerate() {
        for (k, &v) in x[t * n..(t + 1) * n].iter().enumerate() {
            gathered[k * L + l] = v;
        }
    }
    let mut i = 0;
    while i + ROWS <= n {
        let r0 = &weights[i * n..(i + 1) * n];
        let r1 = &weights[(i + 1) * n..(i + 2) * n];
        let r2 = &weights[(i + 2) * n..(i + 3) * n];
        let r3 = &weights[(i + 3) * n..(i + 4) * n];
        let mut a0 = [0.0f64; L];
        let mut a1 = [0.0f64; L];
        let mut a2 = [0.0f64; L];
        let mut a3 = [0.0f64; L];
        for (k, xk) in gathered.chunks_exact(L).enumerate() {
            let xk: &[f64; L] = xk.try_into().unwrap();
            let (w0, w1, w2, w3) = (r0[k], r1[k], r2[k], r3[k]);
            for l in 0..L {
                a0[l] = w0.mul_add(xk[l], a0[l]);
                a1[l] = w1.mul_add(xk[l], a1[l]);
                a2[l] = w2.mul_add(xk[l], a2[l]);
                a3[l] = w3.mul_add(xk[l], a3[l]);
            }
        }
        for (l, &t) in traj.iter().enumerate() {
            let o = &mut out[t * n + i..t * n + i + ROWS];
            o[0] = a0[l];
            o[1] = a1[l];
            o[2] = a2[l];
            o[3] = a3[l];
        }
        i += ROWS;
    }
    while i < n {
        let mut acc = [0.0f64; L];
        let row = &weights[i * n..(i + 1) * n];
        for (&w, xk) in row.iter().zip(gathered.chunks_exact(L)) {
            for l in 0..L {
                acc[l] = w.mul_add(xk[l], acc[l]);
            }
        }
        for (l, &t) in traj.iter().enumerate() {
            out[t * n + i] = acc[l];
        }
        i += 1;
    }
}

/// `out_t = W x_t` for the listed trajectories. `x` and `out` hold
/// trajectories of length `n` back to back.
pub(crate) fn dense_apply(weights: &[f64], n: usize, x: &[f64], out: &mut [f64], active: &[usize]) {
    let mut gathered = Vec::new();
    let mut rest = active;
    while rest.len() >= 32 {
        dense_block::<32>(weights, n, x, out, &rest[..32], &mut gathered);
        rest = &rest[32..];
    }
    while rest.len() >= 8 {
        dense_block::<8>(weights, n, x, out, &rest[..8], &mut gathered);
        rest = &rest[8..];
    }
    for t in rest.chunks(1) {
        dense_block::<1>(weights, n, x, out, t, &mut gathered);
    }
}

/// Circular convolution of two real trajectories at once, packed as the real
/// and imaginary parts of one complex transform.
#[allow(clippy::too_many_arguments)]
pub(crate) fn spectral_apply_pair(
    spectrum: &[Complex64],
    plans: &FftPlans,
    x1: &[f64],
    x2: &[f64],
    y1: &mut [f64],
    y2: &mut [f64],
    buf: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    for ((b, &a), &c) in buf.iter_mut().zip(x1).zip(x2) {
        *b = Complex64::new(a, c);
    }
    plans.forward.process_with_scratch(buf, scratch);
    for (b, s) in buf.iter_mut().zip(spectrum) {
        *b *= s;
    }
    plans.inverse.process_with_scratch(buf, scratch);
    for ((b, o1), o2) in buf.iter().zip(y1.iter_mut()).zip(y2.iter_mut()) {
        *o1 = b.re;
        *o2 = b.im;
    }
}

/// `y = gain · Re(F D_1 F D_2 … [F] x)` with unitary transforms.
#[allow(clippy::too_many_arguments)]
pub(crate) fn structured_apply(
    diagonals: &[Vec<Complex64>],
    final_fourier: bool,
    plans: &FftPlans,
    x: &[f64],
    y: &mut [f64],
    buf: &mut [Complex64],
    scratch: &mut [Complex64],
    gain: f64,
) {
    for (b, &v) in buf.iter_mut().zip(x) {
        *b = Complex64::new(v, 0.0);
    }
    let mut transforms = 0;
    if final_fourier {
        plans.forward.process_with_scratch(buf, scratch);
        transforms += 1;
    }
    for diag in diagonals.iter().rev() {
        for (b, d) in buf.iter_mut().zip(diag) {
            *b *= d;
        }
        plans.forward.process_with_scratch(buf, scratch);
        transforms += 1;
    }
    let scale = gain / (x.len() as f64).powf(0.5 * transforms as f64);
    for (o, b) in y.iter_mut().zip(buf.iter()) {
        *o = b.re * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_apply_matches_naive_for_any_active_set() {
        let n = 13;
        let w: Vec<f64> = (0..n * n).map(|i| (i as f64 * 0.37).cos() / 4.0).collect();
        let x: Vec<f64> = (0..6 * n).map(|i| (i as f64 * 0.11).sin()).collect();
        let mut all = vec![0.0; 6 * n];
        dense_apply(&w, n, &x, &mut all, &[0, 1, 2, 3, 4, 5]);
        let mut some = vec![0.0; 6 * n];
        dense_apply(&w, n, &x, &mut some, &[5, 2]);
        let mut many = vec![0.0; 40 * n];
        let xs: Vec<f64> = (0..40).flat_map(|_| x[..n].to_vec()).collect();
        dense_apply(&w, n, &xs, &mut many, &(0..40).collect::<Vec<_>>());
        for t in 0..40 {
            assert_eq!(many[t * n..(t + 1) * n], all[..n]);
        }
        for t in [2, 5] {
            for i in 0..n {
                assert_eq!(all[t * n + i].to_bits(), some[t * n + i].to_bits());
                let naive: f64 = (0..n).map(|k| w[i * n + k] * x[t * n + k]).sum();
                assert!((all[t * n + i] - naive).abs() < 1e-12);
            }
        }
    }
}
