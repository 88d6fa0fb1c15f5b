use crate::landscape::LandscapeGrid;

/// Sub-threshold mask of a landscape: `mask[r * cols + c]` is `L < τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryField {
    pub mask: Vec<bool>,
    pub rows: usize,
    pub cols: usize,
    pub tau: f64,
}

impl BinaryField {
    pub fn from_mask(mask: Vec<bool>, rows: usize, cols: usize) -> Self {
        assert_eq!(mask.len(), rows * cols, "mask size must be rows × cols");
        Self { mask, rows, cols, tau: f64::NAN }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.cols + col]
    }

    /// Inside/outside swapped.
    pub fn complement(&self) -> Self {
        Self { mask: self.mask.iter().map(|m| !m).collect(), ..self.clone() }
    }
}

pub fn binarize(grid: &LandscapeGrid, tau: f64) -> BinaryField {
    BinaryField {
        mask: grid.values.iter().map(|&v| f64::from(v) < tau).collect(),
        rows: grid.rows(),
        cols: grid.cols(),
        tau,
    }
}

/// Pixels `(row, col)` in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySet {
    pub pixels: Vec<(u32, u32)>,
    pub rows: usize,
    pub cols: usize,
}

impl BoundarySet {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// Inner 4-connected boundary: set pixels with at least one unset in-grid
/// neighbour.
pub fn extract_boundary(field: &BinaryField) -> BoundarySet {
    let (rows, cols) = (field.rows, field.cols);
    let mut pixels = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if !field.get(r, c) {
                continue;
            }
            let edge = (r > 0 && !field.get(r - 1, c))
                || (r + 1 < rows && !field.get(r + 1, c))
                || (c > 0 && !field.get(r, c - 1))
                || (c + 1 < cols && !field.get(r, c + 1));
            if edge {
                pixels.push((r as u32, c as u32));
            }
        }
    }
    BoundarySet { pixels, rows, cols }
}
