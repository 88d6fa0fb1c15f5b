//! `(σ_w, σ_b)` divergence landscapes over finite networks.
//!
//! Every cell of a landscape uses the same network realization and the same
//! input pair; only the two scales change. That makes a landscape a
//! deterministic function of its metadata, so regions can be re-swept at
//! higher magnification and line up with their parent.

mod grid;
mod io;
mod region;
mod render;
mod sweep;
mod tradeoff;

pub use grid::{GridMetadata, LandscapeGrid};
pub use io::{decode, encode, load, save, write_atomic, MAGIC};
pub use region::{Axis, Region, MIN_RESOLUTION};
pub use render::{encode_pgm, gray_levels, render, Scale};
pub use sweep::{
    evaluate_points, sweep, zoom, Progress, ProgressFn, SweepOptions, SweepSpec, DEFAULT_AVG_LAST, DEFAULT_DEPTH,
    DEFAULT_MEM_BUDGET,
};
pub use tradeoff::{tradeoff_scan, TradeoffRow, DEFAULT_EPSILON};
