//! Goodness-of-fit measures: coefficient of determination, mean squared
//! error and mean absolute error.

use serde::{Deserialize, Serialize};

use crate::data::Response;
use crate::error::{Error, Result};

fn check(metric: &'static str, actual: &[f64], predicted: &[f64], min_len: usize) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Metric {
            metric,
            reason: format!("length mismatch ({} vs {})", actual.len(), predicted.len()),
        });
    }
    if actual.len() < min_len {
        return Err(Error::Metric {
            metric,
            reason: format!("need at least {min_len} values, got {}", actual.len()),
        });
    }
    Ok(())
}

/// `1 - SS_res / SS_tot`, with the mean taken over `actual`.
pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check("r2", actual, predicted, 2)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Metric {
            metric: "r2",
            reason: "actual values are constant".into(),
        });
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check("mse", actual, predicted, 1)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum();
    Ok(sum / actual.len() as f64)
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check("mae", actual, predicted, 1)?;
    let sum: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum();
    Ok(sum / actual.len() as f64)
}

/// Test-set scores for one response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseMetrics {
    pub response: Response,
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
    pub n: usize,
}

impl ResponseMetrics {
    pub fn evaluate(response: Response, actual: &[f64], predicted: &[f64]) -> Result<Self> {
        Ok(Self {
            response,
            r2: r2(actual, predicted)?,
            mse: mse(actual, predicted)?,
            mae: mae(actual, predicted)?,
            n: actual.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rows: Vec<ResponseMetrics>,
}

impl MetricsReport {
    pub fn get(&self, response: Response) -> Option<&ResponseMetrics> {
        self.rows.iter().find(|r| r.response == response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn r2_examples() {
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn r2_errors() {
        assert!(r2(&[1.0, 2.0], &[1.0]).is_err());
        assert!(r2(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(r2(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn mse_mae_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 2.5);
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert_eq!(mae(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 1.5);
        assert!(mse(&[], &[]).is_err());
        assert!(mae(&[1.0], &[]).is_err());
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..20).prop_flat_map(|n| {
            (
                proptest::collection::vec(-100.0f64..100.0, n),
                proptest::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn shift_invariance((a, p) in pair(), c in -1e3f64..1e3) {
            let a2: Vec<f64> = a.iter().map(|x| x + c).collect();
            let p2: Vec<f64> = p.iter().map(|x| x + c).collect();
            let scale = 1.0 + c.abs();
            prop_assert!((mse(&a, &p).unwrap() - mse(&a2, &p2).unwrap()).abs() <= 1e-12 * scale * mse(&a, &p).unwrap().max(1.0));
            prop_assert!((mae(&a, &p).unwrap() - mae(&a2, &p2).unwrap()).abs() <= 1e-12 * scale * 100.0);
        }

        #[test]
        fn scale_covariance((a, p) in pair(), k in -10.0f64..10.0) {
            let a2: Vec<f64> = a.iter().map(|x| x * k).collect();
            let p2: Vec<f64> = p.iter().map(|x| x * k).collect();
            let m = mae(&a, &p).unwrap();
            let s = mse(&a, &p).unwrap();
            prop_assert!((mae(&a2, &p2).unwrap() - k.abs() * m).abs() <= 1e-12 * (1.0 + k.abs() * m));
            prop_assert!((mse(&a2, &p2).unwrap() - k * k * s).abs() <= 1e-12 * (1.0 + k * k * s));
        }

        #[test]
        fn r2_affine_invariance((a, p) in pair(), k in 0.1f64..10.0, neg in any::<bool>(), c in -100.0f64..100.0) {
            let k = if neg { -k } else { k };
            let Ok(base) = r2(&a, &p) else { return Ok(()) };
            let a2: Vec<f64> = a.iter().map(|x| k * x + c).collect();
            let p2: Vec<f64> = p.iter().map(|x| k * x + c).collect();
            let moved = r2(&a2, &p2).unwrap();
            prop_assert!((moved - base).abs() <= 1e-9 * (1.0 + base.abs()));
        }

        #[test]
        fn power_mean_inequality((a, p) in pair()) {
            let m = mae(&a, &p).unwrap();
            prop_assert!(m * m <= mse(&a, &p).unwrap() * (1.0 + 1e-12));
            prop_assert!(r2(&a, &p).map(|r| r <= 1.0).unwrap_or(true));
        }
    }
}
