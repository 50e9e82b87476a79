use serde::{Deserialize, Serialize};

use super::{gco_optimize, GcoConfig, Objective};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::objective::Bounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub seed: u64,
    pub best_point: Point,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStartSummary {
    pub runs: Vec<RestartOutcome>,
    pub best_point: Point,
    pub best_value: f64,
    pub median_value: f64,
    pub worst_value: f64,
    /// Population standard deviation of the per-run best points, per axis.
    pub point_spread: Point,
}

/// Independent restarts with seeds `config.seed + k`.
pub fn multi_start_report<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &GcoConfig,
    restarts: usize,
) -> Result<MultiStartSummary> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let runs = (0..restarts as u64)
        .map(|k| {
            let seed = config.seed.wrapping_add(k);
            let r = gco_optimize(objective, bounds, &GcoConfig { seed, ..*config })?;
            Ok(RestartOutcome {
                seed,
                best_point: r.best_point,
                best_value: r.best_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values: Vec<f64> = runs.iter().map(|r| r.best_value).collect();
    values.sort_by(f64::total_cmp);
    let m = values.len();
    let median_value = if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    };
    let best = runs
        .iter()
        .min_by(|a, b| a.best_value.total_cmp(&b.best_value))
        .expect("at least one run");
    let point_spread = std::array::from_fn(|axis| {
        let mean = runs.iter().map(|r| r.best_point[axis]).sum::<f64>() / m as f64;
        (runs.iter().map(|r| (r.best_point[axis] - mean).powi(2)).sum::<f64>() / m as f64).sqrt()
    });
    Ok(MultiStartSummary {
        best_point: best.best_point,
        best_value: best.best_value,
        median_value,
        worst_value: values[m - 1],
        point_spread,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_orders_values() {
        let b = Bounds::new([-2.0; 3], [2.0; 3]).unwrap();
        let config = GcoConfig { max_iterations: 15, seed: 40, ..GcoConfig::default() };
        let sphere = |p: &Point| p.iter().map(|v| v * v).sum::<f64>();
        let s = multi_start_report(&sphere, &b, &config, 4).unwrap();
        assert_eq!(s.runs.len(), 4);
        assert_eq!(s.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![40, 41, 42, 43]);
        assert!(s.best_value <= s.median_value && s.median_value <= s.worst_value);
        assert!(s.point_spread.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn zero_restarts_rejected() {
        let b = Bounds::machining();
        assert!(multi_start_report(&|_: &Point| 0.0, &b, &GcoConfig::default(), 0).is_err());
    }
}
