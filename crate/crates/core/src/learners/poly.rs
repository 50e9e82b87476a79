//! Second-order response surface in three scaled inputs.
//!
//! Basis order is fixed: `[1, s, f, d, s², f², d², sf, sd, fd]`, evaluated on
//! min-max scaled inputs.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Point, Response, ScalingParams};
use crate::error::{Error, Result};

pub const N_COEF: usize = 10;

/// Diagonal ridge added when the normal matrix is not positive definite.
pub const RIDGE: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-12;

pub fn basis(z: &Point) -> [f64; N_COEF] {
    let [s, f, d] = *z;
    [1.0, s, f, d, s * s, f * f, d * d, s * f, s * d, f * d]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialModel {
    pub beta0: f64,
    pub beta_lin: [f64; 3],
    pub beta_sq: [f64; 3],
    /// Pairs (s·f, s·d, f·d).
    pub beta_cross: [f64; 3],
    pub scaling: ScalingParams,
    /// Residual standard deviation on the training data (0 when the fit
    /// has no residual degrees of freedom).
    pub residual_sd: f64,
}

impl PolynomialModel {
    pub fn from_coefficients(coef: [f64; N_COEF], scaling: ScalingParams) -> Self {
        Self {
            beta0: coef[0],
            beta_lin: [coef[1], coef[2], coef[3]],
            beta_sq: [coef[4], coef[5], coef[6]],
            beta_cross: [coef[7], coef[8], coef[9]],
            scaling,
            residual_sd: 0.0,
        }
    }

    pub fn coefficients(&self) -> [f64; N_COEF] {
        let (l, q, c) = (self.beta_lin, self.beta_sq, self.beta_cross);
        [self.beta0, l[0], l[1], l[2], q[0], q[1], q[2], c[0], c[1], c[2]]
    }

    pub fn predict_scaled(&self, z: &Point) -> f64 {
        basis(z)
            .iter()
            .zip(self.coefficients())
            .map(|(b, c)| b * c)
            .sum()
    }

    /// Prediction at a raw (s, f, d) point.
    pub fn predict(&self, point: &Point) -> f64 {
        self.predict_scaled(&self.scaling.scale_point(point))
    }
}

/// Least-squares fit on the training rows of `response`, ridge fallback on.
pub fn fit_pr(train: &Dataset, response: Response, scaling: &ScalingParams) -> Result<PolynomialModel> {
    fit_pr_points(&train.features(), &train.targets(response), scaling, true)
}

pub fn fit_pr_points(
    x: &[Point],
    y: &[f64],
    scaling: &ScalingParams,
    ridge_fallback: bool,
) -> Result<PolynomialModel> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("feature/target length mismatch".into()));
    }
    if x.len() < N_COEF {
        return Err(Error::InvalidParameter(format!(
            "polynomial regression needs at least {N_COEF} rows, got {}",
            x.len()
        )));
    }
    let rows: Vec<[f64; N_COEF]> = x.iter().map(|p| basis(&scaling.scale_point(p))).collect();

    let mut gram = [[0.0; N_COEF]; N_COEF];
    let mut rhs = [0.0; N_COEF];
    for (row, &target) in rows.iter().zip(y) {
        for i in 0..N_COEF {
            rhs[i] += row[i] * target;
            for j in 0..N_COEF {
                gram[i][j] += row[i] * row[j];
            }
        }
    }

    let factor = match cholesky(&gram) {
        Some(l) => l,
        None if ridge_fallback => {
            log::debug!("normal matrix not positive definite; adding ridge {RIDGE}");
            let mut ridged = gram;
            for (i, row) in ridged.iter_mut().enumerate() {
                row[i] += RIDGE;
            }
            cholesky(&ridged).ok_or(Error::RankDeficient)?
        }
        None => return Err(Error::RankDeficient),
    };

    let mut coef = solve_cholesky(&factor, &rhs);
    // one round of iterative refinement against the unridged system
    let mut residual = rhs;
    for i in 0..N_COEF {
        residual[i] -= (0..N_COEF).map(|j| gram[i][j] * coef[j]).sum::<f64>();
    }
    let delta = solve_cholesky(&factor, &residual);
    for i in 0..N_COEF {
        coef[i] += delta[i];
    }

    let mut model = PolynomialModel::from_coefficients(coef, *scaling);
    let sse: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, t)| (t - row.iter().zip(&coef).map(|(b, c)| b * c).sum::<f64>()).powi(2))
        .sum();
    let dof = x.len().saturating_sub(N_COEF);
    model.residual_sd = if dof > 0 { (sse / dof as f64).sqrt() } else { 0.0 };
    Ok(model)
}

type Matrix = [[f64; N_COEF]; N_COEF];

fn cholesky(a: &Matrix) -> Option<Matrix> {
    let scale = (0..N_COEF).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let mut l = [[0.0; N_COEF]; N_COEF];
    for i in 0..N_COEF {
        for j in 0..=i {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= PIVOT_TOL * scale {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn solve_cholesky(l: &Matrix, b: &[f64; N_COEF]) -> [f64; N_COEF] {
    let mut z = [0.0; N_COEF];
    for i in 0..N_COEF {
        z[i] = (b[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = [0.0; N_COEF];
    for i in (0..N_COEF).rev() {
        x[i] = (z[i] - (i + 1..N_COEF).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}
