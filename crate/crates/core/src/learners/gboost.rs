//! Gradient boosting with squared-error loss: each tree fits the current
//! residuals and is added with shrinkage.

use super::ensemble::{EnsembleKind, EnsembleModel, EnsembleParams};
use super::tree::{fit_tree, TreeParams};
use crate::data::{Dataset, Point, Response, ScalingParams};
use crate::error::{Error, Result};

pub fn fit_gb(
    train: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<EnsembleModel> {
    let x: Vec<Point> = train.features().iter().map(|p| scaling.scale_point(p)).collect();
    let y = train.targets(response);
    let (model, _) = boost(&x, &y, scaling, params)?;
    Ok(model)
}

/// Fits the ensemble and returns the training MSE after each tree.
pub(crate) fn boost(
    x: &[Point],
    y: &[f64],
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<(EnsembleModel, Vec<f64>)> {
    if params.n_trees < 1 || params.max_depth < 1 {
        return Err(Error::InvalidParameter("gradient boosting needs n >= 1 and d >= 1".into()));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "learning rate {} outside (0, 1]",
            params.learning_rate
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        max_features: 3,
    };
    let init_value = y.iter().sum::<f64>() / y.len() as f64;
    let mut fitted = vec![init_value; y.len()];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut losses = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(t, f)| t - f).collect();
        let tree = fit_tree(x, &residuals, &tree_params, None)?;
        for (f, p) in fitted.iter_mut().zip(x) {
            *f += params.learning_rate * tree.predict(p);
        }
        trees.push(tree);
        let mse = y.iter().zip(&fitted).map(|(t, f)| (t - f).powi(2)).sum::<f64>() / y.len() as f64;
        losses.push(mse);
    }

    let model = EnsembleModel {
        kind: EnsembleKind::Gb,
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        seed: params.seed,
        learning_rate: params.learning_rate,
        init_value,
        tree_weights: Vec::new(),
        round_losses: Vec::new(),
        scaling: *scaling,
        trees,
    };
    Ok((model, losses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_scaling, make_split, SplitSpec, TargetRange};

    fn setup() -> (Vec<Point>, Vec<f64>, ScalingParams) {
        let (train, _) = make_split(&Dataset::bundled(), &SplitSpec::d1()).unwrap();
        let scaling = fit_scaling(&train, TargetRange::Symmetric).unwrap();
        let x = train.features().iter().map(|p| scaling.scale_point(p)).collect();
        (x, train.targets(Response::F), scaling)
    }

    #[test]
    fn single_full_step_is_init_plus_residual_tree() {
        let (x, y, scaling) = setup();
        let params = EnsembleParams {
            n_trees: 1,
            learning_rate: 1.0,
            max_depth: 20,
            ..EnsembleParams::default()
        };
        let (model, _) = boost(&x, &y, &scaling, &params).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let residuals: Vec<f64> = y.iter().map(|t| t - mean).collect();
        let tree = fit_tree(&x, &residuals, &TreeParams { max_depth: 20, min_leaf: 1, max_features: 3 }, None).unwrap();
        for p in &x {
            assert_eq!(model.predict_scaled(p), mean + tree.predict(p));
        }
        // a deep tree on distinct inputs interpolates the training data
        for (p, t) in x.iter().zip(&y) {
            assert!((model.predict_scaled(p) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn training_loss_never_increases() {
        let (x, y, scaling) = setup();
        for depth in [1, 2, 4, 10] {
            let params = EnsembleParams {
                n_trees: 30,
                max_depth: depth,
                ..EnsembleParams::default()
            };
            let (_, losses) = boost(&x, &y, &scaling, &params).unwrap();
            for w in losses.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "depth {depth}: {losses:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_learning_rate() {
        let (x, y, scaling) = setup();
        for lr in [0.0, -0.5, 1.5] {
            let params = EnsembleParams { learning_rate: lr, ..EnsembleParams::default() };
            assert!(boost(&x, &y, &scaling, &params).is_err());
        }
    }
}
