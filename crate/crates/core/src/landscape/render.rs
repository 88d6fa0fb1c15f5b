use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::LandscapeGrid;
use super::io::write_atomic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log1p,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log1p" => Ok(Scale::Log1p),
            other => Err(Error::Config(format!("unknown scale `{other}` (expected linear or log1p)"))),
        }
    }
}

/// 8-bit gray levels, row-major like the grid: min maps to 0, max to 255.
/// The flag is set for a constant grid, whose levels are all 128.
pub fn gray_levels(grid: &LandscapeGrid, scale: Scale) -> (Vec<u8>, bool) {
    let mapped: Vec<f64> = grid
        .values
        .iter()
        .map(|&v| match scale {
            Scale::Linear => f64::from(v),
            Scale::Log1p => f64::from(v).ln_1p(),
        })
        .collect();
    let (lo, hi) = mapped.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if !(hi > lo) {
        return (vec![128; mapped.len()], true);
    }
    let span = hi - lo;
    (mapped.iter().map(|&v| ((v - lo) / span * 255.0).round() as u8).collect(), false)
}

/// Binary PGM (P5) bytes.
pub fn encode_pgm(grid: &LandscapeGrid, scale: Scale) -> (Vec<u8>, bool) {
    let (levels, degenerate) = gray_levels(grid, scale);
    let mut out = format!("P5\n{} {}\n255\n", grid.cols(), grid.rows()).into_bytes();
    out.extend_from_slice(&levels);
    (out, degenerate)
}

/// Writes the grid as a grayscale PGM. Returns `true` when the grid was
/// constant and the image is uniform mid-gray.
pub fn render(grid: &LandscapeGrid, path: impl AsRef<Path>, scale: Scale) -> Result<bool> {
    let (bytes, degenerate) = encode_pgm(grid, scale);
    if degenerate {
        log::warn!("grid is constant; writing a uniform mid-gray image");
    }
    write_atomic(path.as_ref(), &bytes)?;
    Ok(degenerate)
}
