//! CART regression trees grown by greedy variance reduction.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::rng::StreamRng;
use crate::data::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        value: f64,
        n_samples: usize,
    },
}

impl TreeNode {
    /// Samples with `x[feature] <= threshold` go left.
    pub fn predict(&self, x: &Point) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features considered per split when a feature RNG is supplied.
    pub max_features: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 10,
            min_leaf: 1,
            max_features: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Sum of squared deviations of both children about their own means.
    pub sse: f64,
}

fn sse_of(y: &[f64], idx: &[usize]) -> f64 {
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
    idx.iter().map(|&i| (y[i] - mean).powi(2)).sum()
}

/// Best (lowest child SSE) split of the samples `idx` over `features`.
/// Thresholds are midpoints between consecutive distinct values; ties keep
/// the first candidate in (feature, threshold) order.
pub fn best_split(
    x: &[Point],
    y: &[f64],
    idx: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<SplitCandidate> {
    let n = idx.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    // Centering keeps the prefix-sum form of the SSE accurate.
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n as f64;

    let mut best: Option<SplitCandidate> = None;
    let mut order = idx.to_vec();
    for &feature in features {
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let total: f64 = order.iter().map(|&i| y[i] - mean).sum();
        let total_sq: f64 = order.iter().map(|&i| (y[i] - mean).powi(2)).sum();
        let (mut sum_l, mut sq_l) = (0.0, 0.0);
        for k in 1..n {
            let v = y[order[k - 1]] - mean;
            sum_l += v;
            sq_l += v * v;
            let (lo, hi) = (x[order[k - 1]][feature], x[order[k]][feature]);
            if lo == hi || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let (nl, nr) = (k as f64, (n - k) as f64);
            let sum_r = total - sum_l;
            let sq_r = total_sq - sq_l;
            let sse = (sq_l - sum_l * sum_l / nl).max(0.0) + (sq_r - sum_r * sum_r / nr).max(0.0);
            if best.is_none_or(|b| sse < b.sse) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: 0.5 * (lo + hi),
                    sse,
                });
            }
        }
    }
    best
}

/// Grows one tree. With `feature_rng`, each split looks at a random subset of
/// `params.max_features` features.
pub fn fit_tree(
    x: &[Point],
    y: &[f64],
    params: &TreeParams,
    feature_rng: Option<&mut StreamRng>,
) -> Result<TreeNode> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "tree needs matching non-empty inputs ({} features, {} targets)",
            x.len(),
            y.len()
        )));
    }
    if params.max_depth < 1 {
        return Err(Error::InvalidParameter("max_depth must be at least 1".into()));
    }
    if params.max_features < 1 || params.max_features > 3 {
        return Err(Error::InvalidParameter("max_features must be in 1..=3".into()));
    }
    let idx: Vec<usize> = (0..x.len()).collect();
    let mut grower = Grower {
        x,
        y,
        params,
        rng: feature_rng,
    };
    Ok(grower.grow(&idx, 0))
}

struct Grower<'a, 'r> {
    x: &'a [Point],
    y: &'a [f64],
    params: &'a TreeParams,
    rng: Option<&'r mut StreamRng>,
}

impl Grower<'_, '_> {
    fn leaf(&self, idx: &[usize]) -> TreeNode {
        let value = idx.iter().map(|&i| self.y[i]).sum::<f64>() / idx.len() as f64;
        TreeNode::Leaf {
            value,
            n_samples: idx.len(),
        }
    }

    fn features(&mut self) -> Vec<usize> {
        match self.rng.as_deref_mut() {
            Some(rng) if self.params.max_features < 3 => {
                let mut f = sample(rng, 3, self.params.max_features).into_vec();
                f.sort_unstable();
                f
            }
            _ => vec![0, 1, 2],
        }
    }

    fn grow(&mut self, idx: &[usize], depth: usize) -> TreeNode {
        if depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf.max(1) {
            return self.leaf(idx);
        }
        let parent = sse_of(self.y, idx);
        if parent == 0.0 {
            return self.leaf(idx);
        }
        let features = self.features();
        let Some(split) = best_split(self.x, self.y, idx, &features, self.params.min_leaf) else {
            return self.leaf(idx);
        };
        if split.sse >= parent * (1.0 - 1e-12) {
            return self.leaf(idx);
        }
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x[i][split.feature] <= split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow(&left, depth + 1)),
            right: Box::new(self.grow(&right, depth + 1)),
        }
    }
}
