//! Information propagation through deep random networks of finite width.
//!
//! The crate simulates pairs of inputs travelling through randomly
//! initialized dense, convolutional and Fourier-structured networks, compares
//! the resulting divergence with the infinite-width mean-field prediction,
//! sweeps the `(σ_w, σ_b)` plane into landscapes, and measures the box-counting
//! dimension of the order-to-chaos frontier.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractal;
pub mod landscape;
pub mod meanfield;
pub mod nets;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
