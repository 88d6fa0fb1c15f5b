use crate::error::{Error, Result};

use super::field::BoundarySet;

pub const MIN_SCALES: usize = 4;

/// Number of occupied boxes when the `grid_size`-pixel index square
/// (anchored at the origin) is cut into `2^j × 2^j` boxes. Pixel `p` falls in
/// box `⌊p·2^j / grid_size⌋`, so box sides need not be whole pixels.
pub fn box_count(boundary: &BoundarySet, grid_size: usize, j: u32) -> Result<u64> {
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    if j >= usize::BITS / 2 || (1usize << j) > grid_size {
        return Err(Error::Config(format!("2^{j} boxes per side exceed the grid size {grid_size}")));
    }
    if boundary.rows > grid_size || boundary.cols > grid_size {
        return Err(Error::Config(format!(
            "{}×{} boundary does not fit a {grid_size}-pixel square",
            boundary.rows, boundary.cols
        )));
    }
    let side = 1usize << j;
    let mut occupied = vec![false; side * side];
    let mut count = 0u64;
    for &(r, c) in &boundary.pixels {
        let br = ((r as usize) << j) / grid_size;
        let bc = ((c as usize) << j) / grid_size;
        let slot = &mut occupied[br * side + bc];
        if !*slot {
            *slot = true;
            count += 1;
        }
    }
    Ok(count)
}

/// Least-squares slope of `log₂ N_j` against `j` and the root-mean-square
/// residual of `ln N_j` about the fit.
pub fn fit_dimension(counts: &[(u32, u64)]) -> Result<(f64, f64)> {
    if counts.len() < MIN_SCALES {
        return Err(Error::InsufficientScales { required: MIN_SCALES, actual: counts.len() });
    }
    if let Some(&(j, _)) = counts.iter().find(|&&(_, n)| n == 0) {
        return Err(Error::Domain(format!("box count at scale {j} is zero")));
    }
    let n = counts.len() as f64;
    let xs: Vec<f64> = counts.iter().map(|&(j, _)| f64::from(j)).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all box counts are at the same scale".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok((slope / std::f64::consts::LN_2, (rss / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fractal::field::{extract_boundary, BinaryField};

    fn column(size: usize) -> BoundarySet {
        BoundarySet { pixels: (0..size as u32).map(|r| (r, 5)).collect(), rows: size, cols: size }
    }

    #[test]
    fn single_pixel_is_one_box() {
        let b = BoundarySet { pixels: vec![(7, 3)], rows: 16, cols: 16 };
        for j in 0..=4 {
            assert_eq!(box_count(&b, 16, j).unwrap(), 1);
        }
    }

    #[test]
    fn straight_column_hits_one_box_per_band() {
        let b = column(1024);
        for j in 0..=10 {
            assert_eq!(box_count(&b, 1024, j).unwrap(), 1 << j);
        }
    }

    #[test]
    fn preconditions() {
        let empty = BoundarySet { pixels: vec![], rows: 8, cols: 8 };
        assert!(matches!(box_count(&empty, 8, 1), Err(Error::EmptyBoundary)));
        assert!(box_count(&column(8), 8, 4).is_err());
        assert!(matches!(
            fit_dimension(&[(1, 2), (2, 4), (3, 8)]),
            Err(Error::InsufficientScales { required: 4, actual: 3 })
        ));
    }

    #[test]
    fn exact_power_laws() {
        let line: Vec<_> = (2..9).map(|j| (j, 1u64 << j)).collect();
        let (d, res) = fit_dimension(&line).unwrap();
        assert!((d - 1.0).abs() < 1e-12 && res < 1e-12);
        let plane: Vec<_> = (2..9).map(|j| (j, 1u64 << (2 * j))).collect();
        assert!((fit_dimension(&plane).unwrap().0 - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn counts_grow_at_most_fourfold(seed in any::<u64>(), density in 0.05f64..0.6) {
            let size = 64;
            let mut state = seed | 1;
            let mask = (0..size * size)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state >> 11) as f64 / (1u64 << 53) as f64 > density
                })
                .collect();
            let b = extract_boundary(&BinaryField::from_mask(mask, size, size));
            prop_assume!(!b.is_empty());
            let counts: Vec<u64> = (0..=6).map(|j| box_count(&b, size, j).unwrap()).collect();
            for w in counts.windows(2) {
                prop_assert!(w[1] >= w[0] && w[1] <= 4 * w[0]);
            }
        }
    }
}
