use super::{Objective, OptimizationResult};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::objective::Bounds;

/// Largest number of grid evaluations accepted without an explicit budget.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// `resolution` evenly spaced values covering both endpoints of an axis.
pub fn grid_axis(bounds: &Bounds, axis: usize, resolution: usize) -> Vec<f64> {
    let (lo, hi) = (bounds.lower[axis], bounds.upper[axis]);
    let step = (hi - lo) / (resolution - 1) as f64;
    (0..resolution)
        .map(|i| if i + 1 == resolution { hi } else { lo + i as f64 * step })
        .collect()
}

pub fn grid_spacing(bounds: &Bounds, resolution: [usize; 3]) -> [f64; 3] {
    std::array::from_fn(|axis| bounds.width(axis) / (resolution[axis] - 1) as f64)
}

/// True when `a` and `b` differ by at most `cells` grid spacings on every axis.
pub fn within_cells(a: &Point, b: &Point, bounds: &Bounds, resolution: [usize; 3], cells: f64) -> bool {
    let spacing = grid_spacing(bounds, resolution);
    (0..3).all(|axis| (a[axis] - b[axis]).abs() <= cells * spacing[axis] * (1.0 + 1e-9))
}

/// Exhaustive minimum over a full-factorial grid. Ties keep the point seen
/// first (speed-major order). `history` holds the running best after each
/// speed slice.
pub fn grid_search<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    resolution: [usize; 3],
    budget: usize,
) -> Result<OptimizationResult> {
    Bounds::new(bounds.lower, bounds.upper)?;
    if let Some(r) = resolution.iter().find(|&&r| r < 2) {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {r} must be at least 2 per axis"
        )));
    }
    let size = resolution
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .unwrap_or(usize::MAX);
    if size > budget {
        return Err(Error::GridBudget { size, budget });
    }
    let axes: [Vec<f64>; 3] = std::array::from_fn(|axis| grid_axis(bounds, axis, resolution[axis]));

    let mut best_point = [axes[0][0], axes[1][0], axes[2][0]];
    let mut best_value = f64::INFINITY;
    let mut history = Vec::with_capacity(resolution[0]);
    for &s in &axes[0] {
        for &f in &axes[1] {
            for &d in &axes[2] {
                let p = [s, f, d];
                let v = objective.evaluate(&p);
                if v < best_value {
                    best_value = v;
                    best_point = p;
                }
            }
        }
        history.push(best_value);
    }
    Ok(OptimizationResult {
        best_point,
        best_value,
        history,
        evaluations: size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_include_both_endpoints() {
        let b = Bounds::machining();
        let s = grid_axis(&b, 0, 51);
        assert_eq!(s.len(), 51);
        assert_eq!(s[0], 40.0);
        assert_eq!(s[50], 90.0);
        assert!((s[1] - 41.0).abs() < 1e-12);
        let d = grid_axis(&b, 2, 31);
        assert_eq!(d[30], 0.5);
        assert!((d[1] - 0.21).abs() < 1e-12);
    }

    #[test]
    fn odd_resolution_sphere_hits_center() {
        let b = Bounds::new([-1.0; 3], [1.0; 3]).unwrap();
        let r = grid_search(&|p: &Point| p.iter().map(|v| v * v).sum::<f64>(), &b, [5, 7, 9], DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_point, [0.0; 3]);
        assert_eq!(r.best_value, 0.0);
        assert_eq!(r.evaluations, 5 * 7 * 9);
        assert_eq!(r.history.len(), 5);
    }

    #[test]
    fn monotone_objective_picks_corner() {
        let b = Bounds::machining();
        let r = grid_search(&|p: &Point| p[0] + 100.0 * p[1] + 10.0 * p[2], &b, [3, 3, 3], DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_point, b.lower);
    }

    #[test]
    fn ties_keep_first_point() {
        let b = Bounds::machining();
        let r = grid_search(&|_: &Point| 1.0, &b, [2, 2, 2], DEFAULT_BUDGET).unwrap();
        assert_eq!(r.best_point, b.lower);
    }

    #[test]
    fn rejects_bad_resolution_and_budget() {
        let b = Bounds::machining();
        let f = |_: &Point| 0.0;
        assert!(matches!(grid_search(&f, &b, [1, 5, 5], 100), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            grid_search(&f, &b, [10, 10, 10], 999),
            Err(Error::GridBudget { size: 1000, budget: 999 })
        ));
    }

    #[test]
    fn cell_distance() {
        let b = Bounds::machining();
        let res = [51, 49, 31];
        assert!(within_cells(&[90.0, 0.04, 0.2], &[89.0, 0.0425, 0.21], &b, res, 1.0));
        assert!(!within_cells(&[90.0, 0.04, 0.2], &[88.0, 0.04, 0.2], &b, res, 1.0));
    }
}
