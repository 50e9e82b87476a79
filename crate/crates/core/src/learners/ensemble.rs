use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::TreeNode;
use crate::data::{Point, ScalingParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Rf,
    Gb,
    Ab,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Rf => "rf",
            EnsembleKind::Gb => "gb",
            EnsembleKind::Ab => "ab",
        })
    }
}

/// Hyperparameters shared by the tree ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// Number of trees (n).
    pub n_trees: usize,
    /// Maximum tree depth (d).
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Shrinkage for gradient boosting; ignored elsewhere.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            n_trees: 5,
            max_depth: 10,
            min_leaf: 1,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

/// A fitted bag or boost of regression trees over scaled inputs.
///
/// * RF: unweighted mean of the trees.
/// * GB: `init_value + learning_rate * sum(trees)`.
/// * AB: weighted median of the trees under `tree_weights` (`ln(1/beta_t)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub kind: EnsembleKind,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub init_value: f64,
    pub tree_weights: Vec<f64>,
    /// Mean AdaBoost loss of each retained round.
    pub round_losses: Vec<f64>,
    pub scaling: ScalingParams,
    pub trees: Vec<TreeNode>,
}

impl EnsembleModel {
    pub fn predict(&self, point: &Point) -> f64 {
        self.predict_scaled(&self.scaling.scale_point(point))
    }

    pub fn predict_scaled(&self, z: &Point) -> f64 {
        match self.kind {
            EnsembleKind::Rf => {
                self.trees.iter().map(|t| t.predict(z)).sum::<f64>() / self.trees.len() as f64
            }
            EnsembleKind::Gb => {
                self.init_value
                    + self.learning_rate * self.trees.iter().map(|t| t.predict(z)).sum::<f64>()
            }
            EnsembleKind::Ab => {
                let preds: Vec<f64> = self.trees.iter().map(|t| t.predict(z)).collect();
                weighted_median(&preds, &self.tree_weights)
            }
        }
    }
}

/// Smallest value whose cumulative weight reaches half the total.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let half = 0.5 * weights.iter().sum::<f64>();
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return values[i];
        }
    }
    values[*order.last().expect("non-empty ensemble")]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_median_cases() {
        assert_eq!(weighted_median(&[3.0], &[1.0]), 3.0);
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[0.1, 0.1, 5.0]), 3.0);
        assert_eq!(weighted_median(&[3.0, 1.0], &[1.0, 1.0]), 1.0);
    }
}
