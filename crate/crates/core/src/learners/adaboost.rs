//! AdaBoost.R2 with linear loss.
//!
//! Each round trains a tree on a weighted bootstrap of the training set,
//! scores every training sample by `|error| / max|error|`, and reweights the
//! samples by `beta^(1 - loss)` with `beta = L / (1 - L)`. Rounds whose mean
//! loss `L` reaches 0.5 end training.

use rand::Rng;

use super::ensemble::{EnsembleKind, EnsembleModel, EnsembleParams};
use super::rng::{stream, StreamRng};
use super::tree::{fit_tree, TreeParams};
use crate::data::{Dataset, Point, Response, ScalingParams};
use crate::error::{Error, Result};

pub fn fit_ab(
    train: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<EnsembleModel> {
    let x: Vec<Point> = train.features().iter().map(|p| scaling.scale_point(p)).collect();
    let y = train.targets(response);
    Ok(boost(&x, &y, scaling, params)?.0)
}

fn weighted_bootstrap(rng: &mut StreamRng, weights: &[f64]) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cdf.push(acc);
    }
    (0..weights.len())
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(weights.len() - 1)
        })
        .collect()
}

/// Fits the ensemble and returns the sample-weight distribution after every
/// reweighting step.
pub(crate) fn boost(
    x: &[Point],
    y: &[f64],
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<(EnsembleModel, Vec<Vec<f64>>)> {
    if params.n_trees < 1 || params.max_depth < 1 {
        return Err(Error::InvalidParameter("AdaBoost needs n >= 1 and d >= 1".into()));
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = y.len();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        max_features: 3,
    };
    let mut weights = vec![1.0 / n as f64; n];
    let mut history = Vec::new();
    let mut trees = Vec::new();
    let mut tree_weights = Vec::new();
    let mut round_losses = Vec::new();

    for round in 0..params.n_trees {
        let mut rng = stream(params.seed, round as u64);
        let idx = weighted_bootstrap(&mut rng, &weights);
        let xs: Vec<Point> = idx.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let tree = fit_tree(&xs, &ys, &tree_params, None)?;

        let errors: Vec<f64> = x.iter().zip(y).map(|(p, t)| (tree.predict(p) - t).abs()).collect();
        let max_error = errors.iter().cloned().fold(0.0, f64::max);
        if max_error == 0.0 {
            trees.push(tree);
            tree_weights.push(1.0);
            round_losses.push(0.0);
            break;
        }
        let losses: Vec<f64> = errors.iter().map(|e| e / max_error).collect();
        let mean_loss: f64 = losses.iter().zip(&weights).map(|(l, w)| l * w).sum();
        if mean_loss >= 0.5 {
            if trees.is_empty() {
                trees.push(tree);
                tree_weights.push(1.0);
                round_losses.push(mean_loss);
            }
            break;
        }
        let beta = mean_loss / (1.0 - mean_loss);
        trees.push(tree);
        tree_weights.push((1.0 / beta).ln());
        round_losses.push(mean_loss);

        for (w, l) in weights.iter_mut().zip(&losses) {
            *w *= beta.powf(1.0 - l);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            break;
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        history.push(weights.clone());
    }

    let model = EnsembleModel {
        kind: EnsembleKind::Ab,
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        seed: params.seed,
        learning_rate: 1.0,
        init_value: 0.0,
        tree_weights,
        round_losses,
        scaling: *scaling,
        trees,
    };
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_scaling, make_split, SplitSpec, TargetRange};

    fn setup(response: Response) -> (Vec<Point>, Vec<f64>, ScalingParams) {
        let (train, _) = make_split(&Dataset::bundled(), &SplitSpec::d1()).unwrap();
        let scaling = fit_scaling(&train, TargetRange::Symmetric).unwrap();
        let x = train.features().iter().map(|p| scaling.scale_point(p)).collect();
        (x, train.targets(response), scaling)
    }

    #[test]
    fn perfectly_fittable_single_round() {
        let x: Vec<Point> = (0..8).map(|i| [(i % 2) as f64, 0.0, 0.0]).collect();
        let y: Vec<f64> = x.iter().map(|p| 1.0 + 3.0 * p[0]).collect();
        let scaling = crate::data::ScalingParams::new([0.0; 3], [1.0; 3], TargetRange::Unit).unwrap();
        let params = EnsembleParams {
            n_trees: 1,
            ..EnsembleParams::default()
        };
        let (model, _) = boost(&x, &y, &scaling, &params).unwrap();
        assert_eq!(model.trees.len(), 1);
        assert_eq!(model.tree_weights, vec![1.0]);
        for (p, t) in x.iter().zip(&y) {
            assert_eq!(model.predict_scaled(p), model.trees[0].predict(p));
            assert_eq!(model.predict_scaled(p), *t);
        }
    }

    #[test]
    fn weights_stay_a_distribution() {
        for response in Response::ALL {
            let (x, y, scaling) = setup(response);
            for seed in 0..5 {
                let params = EnsembleParams {
                    n_trees: 20,
                    max_depth: 3,
                    seed,
                    ..EnsembleParams::default()
                };
                let (model, history) = boost(&x, &y, &scaling, &params).unwrap();
                for w in &history {
                    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                    assert!(w.iter().all(|v| *v >= 0.0));
                }
                assert!(model.trees.len() <= 20);
                assert_eq!(model.trees.len(), model.tree_weights.len());
                for l in &model.round_losses {
                    assert!((0.0..1.0).contains(l), "{l}");
                }
            }
        }
    }

    #[test]
    fn training_predictions_stay_in_target_range() {
        for response in Response::ALL {
            let (x, y, scaling) = setup(response);
            let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
            let (model, _) = boost(&x, &y, &scaling, &EnsembleParams::default()).unwrap();
            for p in &x {
                let v = model.predict_scaled(p);
                assert!(v >= lo && v <= hi);
            }
        }
    }

    #[test]
    fn weighted_bootstrap_follows_weights() {
        let mut rng = stream(5, 0);
        let idx = weighted_bootstrap(&mut rng, &[0.0, 1.0, 0.0]);
        assert!(idx.iter().all(|&i| i == 1));
    }
}
