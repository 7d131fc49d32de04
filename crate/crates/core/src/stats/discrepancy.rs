//! Star discrepancy `D* = sup_b | #{x in [0, b)} / n - vol([0, b)) |`.
//!
//! One dimension is exact. In two and three dimensions the supremum is
//! bracketed on a grid with `m` cells per axis: the grid corners give
//! attained values (a lower bound), and monotonicity of counts and volumes
//! inside each cell gives an upper bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID_2D: usize = 512;
pub const DEFAULT_GRID_3D: usize = 64;

/// Point-count limit for the grid bounds.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    /// cells per axis, 0 for the exact path
    pub grid: usize,
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("coordinate {x} is outside [0, 1)")))
    }
}

/// Exact 1-D value `max_i max(i/n - x_(i), x_(i) - (i-1)/n)` over sorted points.
pub fn star_discrepancy_1d(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    for &x in points {
        check_unit(x)?;
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    Ok(d)
}

/// `O(n^2)` scan over anchored intervals ending at each sample point, with
/// both the open and the closed end. Reference for [`star_discrepancy_1d`].
pub fn star_discrepancy_1d_brute(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let n = points.len() as f64;
    let mut d: f64 = 0.0;
    for &t in points {
        check_unit(t)?;
        let closed = points.iter().filter(|&&x| x <= t).count();
        let open = points.iter().filter(|&&x| x < t).count();
        d = d.max(closed as f64 / n - t).max(t - open as f64 / n);
    }
    Ok(d)
}

/// Per axis: the index `o` of the first grid value strictly above `x` and the
/// index `c` of the first grid value at or above it.
fn grid_indices(x: f64, grid: &[f64]) -> (usize, usize) {
    let m = grid.len() - 1;
    let mut k = ((x * m as f64) as usize).min(m);
    while k < m && grid[k + 1] <= x {
        k += 1;
    }
    while k > 0 && grid[k] > x {
        k -= 1;
    }
    let open = k + 1;
    let closed = if grid[k] == x { k } else { k + 1 };
    (open, closed)
}

/// Cumulative counts over a (m+2)^dim lattice: entry at corner index `g`
/// counts points whose per-axis index is at most `g` on every axis.
fn cumulate(hist: &mut [u64], side: usize, dim: usize) {
    let mut stride = 1;
    for _ in 0..dim {
        for idx in 0..hist.len() {
            if (idx / stride) % side != 0 {
                hist[idx] += hist[idx - stride];
            }
        }
        stride *= side;
    }
}

/// Bounds on the star discrepancy of `points` (each of length `dim`).
/// `grid = None` uses 512 cells per axis in 2-D and 64 in 3-D.
pub fn star_discrepancy(points: &[Vec<f64>], dim: usize, grid: Option<usize>) -> Result<DiscrepancyBounds> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, actual: p.len() });
    }
    match dim {
        1 => {
            let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
            let d = star_discrepancy_1d(&xs)?;
            Ok(DiscrepancyBounds { lower: d, upper: d, exact: true, grid: 0 })
        }
        2 | 3 => {
            if points.len() > MAX_GRID_POINTS {
                return Err(Error::Capacity { n: points.len(), max: MAX_GRID_POINTS });
            }
            let m = grid.unwrap_or(if dim == 2 { DEFAULT_GRID_2D } else { DEFAULT_GRID_3D });
            if m < 1 {
                return Err(Error::InvalidInput("grid must have at least one cell".into()));
            }
            grid_bounds(points, dim, m)
        }
        _ => Err(Error::InvalidInput(format!("dimension must be 1, 2 or 3, got {dim}"))),
    }
}

fn grid_bounds(points: &[Vec<f64>], dim: usize, m: usize) -> Result<DiscrepancyBounds> {
    let g: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let side = m + 2;
    let cells = side.pow(dim as u32);
    let mut open = vec![0u64; cells];
    let mut closed = vec![0u64; cells];
    for p in points {
        let (mut io, mut ic, mut stride) = (0, 0, 1);
        for &x in p {
            check_unit(x)?;
            let (o, c) = grid_indices(x, &g);
            io += o * stride;
            ic += c * stride;
            stride *= side;
        }
        open[io] += 1;
        closed[ic] += 1;
    }
    cumulate(&mut open, side, dim);
    cumulate(&mut closed, side, dim);
    let n = points.len() as f64;

    let corner = |idx: &[usize]| -> (usize, f64) {
        let mut flat = 0;
        let mut stride = 1;
        let mut vol = 1.0;
        for &i in idx {
            flat += i * stride;
            stride *= side;
            vol *= g[i];
        }
        (flat, vol)
    };

    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    let mut idx = vec![0usize; dim];
    let mut hi = vec![0usize; dim];
    loop {
        let (f, vol) = corner(&idx);
        // a point at x is inside [0, b) iff its open index is <= b's index
        lower = lower.max(closed[f] as f64 / n - vol).max(vol - open[f] as f64 / n);
        if idx.iter().all(|&i| i < m) {
            for (h, &i) in hi.iter_mut().zip(&idx) {
                *h = i + 1;
            }
            let (fh, vol_hi) = corner(&hi);
            upper = upper.max(closed[fh] as f64 / n - vol).max(vol_hi - open[f] as f64 / n);
        }
        // odometer over 0..=m per axis
        let mut axis = 0;
        loop {
            if axis == dim {
                return Ok(DiscrepancyBounds { lower, upper: upper.max(lower), exact: false, grid: m });
            }
            idx[axis] += 1;
            if idx[axis] <= m {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Exact 1-D discrepancy of the first `n` samples for each `n` in `checkpoints`.
pub fn discrepancy_curve(samples: &[f64], checkpoints: &[usize]) -> Result<Vec<(usize, f64)>> {
    checkpoints
        .iter()
        .map(|&n| {
            if n == 0 || n > samples.len() {
                return Err(Error::InvalidInput(format!("checkpoint {n} is outside 1..={}", samples.len())));
            }
            Ok((n, star_discrepancy_1d(&samples[..n])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        assert_eq!(star_discrepancy_1d(&[0.5]).unwrap(), 0.5);
        assert_eq!(star_discrepancy_1d_brute(&[0.5]).unwrap(), 0.5);
    }

    #[test]
    fn centered_grid() {
        for n in [1usize, 2, 7, 100] {
            let pts: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64 / (2 * n) as f64).collect();
            let d = star_discrepancy_1d(&pts).unwrap();
            assert!((d - 1.0 / (2 * n) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn brute_force_agrees_with_ties() {
        let pts = [0.25, 0.25, 0.5, 0.0, 0.75, 0.75, 0.75];
        assert_eq!(star_discrepancy_1d(&pts).unwrap(), star_discrepancy_1d_brute(&pts).unwrap());
    }

    #[test]
    fn errors() {
        assert!(star_discrepancy_1d(&[]).is_err());
        assert!(star_discrepancy_1d(&[1.0]).is_err());
        assert!(star_discrepancy(&[vec![0.1, 0.2]], 4, None).is_err());
        assert!(star_discrepancy(&[vec![0.1]], 2, None).is_err());
    }

    /// Exhaustive 2-D value for a few points: the supremum is attained as a
    /// limit at box corners built from point coordinates and 1.
    fn brute_2d(points: &[Vec<f64>]) -> f64 {
        let n = points.len() as f64;
        let mut xs: Vec<f64> = points.iter().map(|p| p[0]).chain([1.0]).collect();
        let mut ys: Vec<f64> = points.iter().map(|p| p[1]).chain([1.0]).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for &bx in &xs {
            for &by in &ys {
                let vol = bx * by;
                let open = points.iter().filter(|p| p[0] < bx && p[1] < by).count() as f64;
                let closed = points.iter().filter(|p| p[0] <= bx && p[1] <= by).count() as f64;
                d = d.max(closed / n - vol).max(vol - open / n);
            }
        }
        d
    }

    #[test]
    fn grid_bounds_bracket_exact_value() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in [1usize, 5, 30] {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![next(), next()]).collect();
            let exact = brute_2d(&pts);
            for m in [8usize, 64, 512] {
                let b = star_discrepancy(&pts, 2, Some(m)).unwrap();
                assert!(b.lower <= exact + 1e-12 && exact <= b.upper + 1e-12, "n={n} m={m} {b:?} {exact}");
            }
        }
    }

    #[test]
    fn grid_points_on_lines() {
        // coordinates exactly on grid lines exercise the open/closed split
        let pts = vec![vec![0.5, 0.5], vec![0.25, 0.75], vec![0.0, 0.0]];
        let exact = brute_2d(&pts);
        let b = star_discrepancy(&pts, 2, Some(4)).unwrap();
        assert!(b.lower <= exact + 1e-15 && exact <= b.upper + 1e-15);
        assert!((b.lower - exact).abs() < 1e-15);
    }

    #[test]
    fn three_d_single_point() {
        // one point at the origin: the box [0, b] just above it holds all mass
        let b = star_discrepancy(&[vec![0.0, 0.0, 0.0]], 3, Some(4)).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_eq!(b.upper, 1.0);
    }

    #[test]
    fn curve() {
        let s: Vec<f64> = (0..10).map(|i| (i as f64 * 0.618_033_988_7) % 1.0).collect();
        let c = discrepancy_curve(&s, &[1, 5, 10]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], (1, star_discrepancy_1d(&s[..1]).unwrap()));
        assert!(discrepancy_curve(&s, &[11]).is_err());
    }
}
