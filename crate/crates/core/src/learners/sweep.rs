use serde::{Deserialize, Serialize};

use super::ensemble::EnsembleParams;
use super::forest::fit_rf;
use crate::data::{Dataset, Response, ScalingParams};
use crate::error::{Error, Result};
use crate::metrics::r2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub d: usize,
    /// Test R²; `None` where it is undefined.
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub response: Response,
    pub cells: Vec<SweepCell>,
    pub best: (usize, usize),
    pub best_r2: f64,
}

/// Random-forest test R² over the grid `n_grid x d_grid`. The best cell has
/// the highest R²; ties go to smaller n, then smaller d.
pub fn sweep_rf(
    train: &Dataset,
    test: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    n_grid: &[usize],
    d_grid: &[usize],
    base: &EnsembleParams,
) -> Result<SweepResult> {
    if n_grid.is_empty() || d_grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be non-empty".into()));
    }
    let actual = test.targets(response);
    let mut cells = Vec::with_capacity(n_grid.len() * d_grid.len());
    let mut best: Option<(usize, usize, f64)> = None;
    for &n in n_grid {
        for &d in d_grid {
            let params = EnsembleParams {
                n_trees: n,
                max_depth: d,
                ..*base
            };
            let model = fit_rf(train, response, scaling, &params)?;
            let predicted: Vec<f64> = test.features().iter().map(|p| model.predict(p)).collect();
            let score = r2(&actual, &predicted).ok();
            if let Some(s) = score {
                let better = match best {
                    None => true,
                    Some((bn, bd, bs)) => s > bs || (s == bs && (n, d) < (bn, bd)),
                };
                if better {
                    best = Some((n, d, s));
                }
            }
            cells.push(SweepCell { n, d, r2: score });
        }
    }
    let (n, d, best_r2) = best.ok_or_else(|| {
        Error::SweepUndefined(format!("test values of {response} are constant or too few"))
    })?;
    Ok(SweepResult {
        response,
        cells,
        best: (n, d),
        best_r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_scaling, make_split, MachiningSample, SplitSpec, TargetRange};

    fn setup() -> (Dataset, Dataset, ScalingParams) {
        let (train, test) = make_split(&Dataset::bundled(), &SplitSpec::d1()).unwrap();
        let scaling = fit_scaling(&train, TargetRange::Symmetric).unwrap();
        (train, test, scaling)
    }

    #[test]
    fn singleton_grid() {
        let (train, test, scaling) = setup();
        let r = sweep_rf(&train, &test, Response::F, &scaling, &[5], &[10], &EnsembleParams::default()).unwrap();
        assert_eq!(r.best, (5, 10));
        assert_eq!(r.cells.len(), 1);
    }

    #[test]
    fn best_is_grid_maximum_with_tie_break() {
        let (train, test, scaling) = setup();
        let r = sweep_rf(&train, &test, Response::Ra, &scaling, &[1, 2, 3, 5], &[1, 2, 10, 12], &EnsembleParams::default()).unwrap();
        let max = r.cells.iter().filter_map(|c| c.r2).fold(f64::MIN, f64::max);
        assert_eq!(r.best_r2, max);
        let first = r.cells.iter().filter(|c| c.r2 == Some(max)).map(|c| (c.n, c.d)).min().unwrap();
        assert_eq!(r.best, first);
    }

    #[test]
    fn constant_test_target_is_undefined_everywhere() {
        let (train, test, scaling) = setup();
        let flat: Vec<MachiningSample> = test
            .samples()
            .iter()
            .map(|s| MachiningSample { force: 100.0, ..*s })
            .collect();
        let flat = Dataset::new(flat).unwrap();
        let err = sweep_rf(&train, &flat, Response::F, &scaling, &[1, 2], &[3], &EnsembleParams::default()).unwrap_err();
        assert!(matches!(err, Error::SweepUndefined(_)));
    }

    #[test]
    fn empty_grid_rejected() {
        let (train, test, scaling) = setup();
        assert!(sweep_rf(&train, &test, Response::F, &scaling, &[], &[10], &EnsembleParams::default()).is_err());
    }
}
