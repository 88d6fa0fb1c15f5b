//! Random finite-width networks and the forward propagation of input pairs.

pub mod dft;
pub mod draws;
pub(crate) mod kernels;
pub mod layer;
pub mod propagate;
pub mod topology;

pub use dft::{dft_unitary, FftPlans};
pub use draws::{layer_bytes, LayerDraws, LayerSource, LinearOp, PreparedLayer, STRUCTURED_GAIN};
pub use layer::{circular_convolve_fft, circular_convolve_pair, divergence, forward_layer};
pub use propagate::{propagate_pair, run_cells, InputMode, PairBatch, PairInputs, PairTrace};
pub use topology::{Activation, TopologyConfig, TopologyKind};
