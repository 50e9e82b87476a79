//! Random forest: bootstrap resamples plus per-split feature bagging.

use rand::Rng;

use super::ensemble::{EnsembleKind, EnsembleModel, EnsembleParams};
use super::rng::{stream, StreamRng};
use super::tree::{fit_tree, TreeParams};
use crate::data::{Dataset, Point, Response, ScalingParams};
use crate::error::{Error, Result};

/// Features tried per split: ceil(3 / 2).
pub const BAGGED_FEATURES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestOptions {
    pub bootstrap: bool,
    pub max_features: usize,
}

impl Default for ForestOptions {
    fn default() -> Self {
        Self {
            bootstrap: true,
            max_features: BAGGED_FEATURES,
        }
    }
}

/// `n` indices drawn uniformly with replacement.
pub fn bootstrap_indices(rng: &mut StreamRng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// The bootstrap sample tree `tree` of a forest seeded with `seed` trains on.
pub fn tree_bootstrap(seed: u64, tree: usize, n: usize) -> Vec<usize> {
    bootstrap_indices(&mut stream(seed, tree as u64), n)
}

pub fn fit_rf(
    train: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<EnsembleModel> {
    fit_rf_with(train, response, scaling, params, ForestOptions::default())
}

pub fn fit_rf_with(
    train: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    params: &EnsembleParams,
    options: ForestOptions,
) -> Result<EnsembleModel> {
    if params.n_trees < 1 || params.max_depth < 1 {
        return Err(Error::InvalidParameter("random forest needs n >= 1 and d >= 1".into()));
    }
    let x: Vec<Point> = train.features().iter().map(|p| scaling.scale_point(p)).collect();
    let y = train.targets(response);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        max_features: options.max_features,
    };

    let mut trees = Vec::with_capacity(params.n_trees);
    for t in 0..params.n_trees {
        let mut rng = stream(params.seed, t as u64);
        let tree = if options.bootstrap {
            let idx = bootstrap_indices(&mut rng, x.len());
            let xs: Vec<Point> = idx.iter().map(|&i| x[i]).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            fit_tree(&xs, &ys, &tree_params, Some(&mut rng))?
        } else {
            fit_tree(&x, &y, &tree_params, Some(&mut rng))?
        };
        trees.push(tree);
    }

    Ok(EnsembleModel {
        kind: EnsembleKind::Rf,
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        seed: params.seed,
        learning_rate: 1.0,
        init_value: 0.0,
        tree_weights: Vec::new(),
        round_losses: Vec::new(),
        scaling: *scaling,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_scaling, make_split, SplitSpec, TargetRange};

    fn setup() -> (Dataset, Dataset, ScalingParams) {
        let (train, test) = make_split(&Dataset::bundled(), &SplitSpec::d1()).unwrap();
        let scaling = fit_scaling(&train, TargetRange::Symmetric).unwrap();
        (train, test, scaling)
    }

    #[test]
    fn single_tree_without_bootstrap_is_plain_tree() {
        let (train, test, scaling) = setup();
        let params = EnsembleParams {
            n_trees: 1,
            ..EnsembleParams::default()
        };
        let options = ForestOptions {
            bootstrap: false,
            max_features: 3,
        };
        let forest = fit_rf_with(&train, Response::F, &scaling, &params, options).unwrap();
        let x: Vec<Point> = train.features().iter().map(|p| scaling.scale_point(p)).collect();
        let plain = fit_tree(
            &x,
            &train.targets(Response::F),
            &TreeParams {
                max_depth: 10,
                min_leaf: 1,
                max_features: 3,
            },
            None,
        )
        .unwrap();
        for p in test.features() {
            assert_eq!(forest.predict(&p), plain.predict(&scaling.scale_point(&p)));
        }
    }

    #[test]
    fn seeded_and_order_free() {
        let (train, test, scaling) = setup();
        let params = EnsembleParams {
            seed: 11,
            ..EnsembleParams::default()
        };
        let a = fit_rf(&train, Response::CwL, &scaling, &params).unwrap();
        let b = fit_rf(&train, Response::CwL, &scaling, &params).unwrap();
        assert_eq!(a, b);
        let mut reversed = a.clone();
        reversed.trees.reverse();
        for p in test.features() {
            assert!((a.predict(&p) - reversed.predict(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn tree_sample_does_not_depend_on_forest_size() {
        let (train, _, scaling) = setup();
        let small = fit_rf(&train, Response::F, &scaling, &EnsembleParams { n_trees: 2, ..Default::default() }).unwrap();
        let large = fit_rf(&train, Response::F, &scaling, &EnsembleParams { n_trees: 6, ..Default::default() }).unwrap();
        assert_eq!(small.trees[..], large.trees[..2]);
    }

    #[test]
    fn training_predictions_stay_in_target_range() {
        let (train, _, scaling) = setup();
        for response in Response::ALL {
            let y = train.targets(response);
            let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
            let model = fit_rf(&train, response, &scaling, &EnsembleParams::default()).unwrap();
            for p in train.features() {
                let v = model.predict(&p);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn bootstrap_differs_across_seeds() {
        assert_eq!(tree_bootstrap(1, 0, 41), tree_bootstrap(1, 0, 41));
        assert_ne!(tree_bootstrap(1, 0, 41), tree_bootstrap(2, 0, 41));
        assert_ne!(tree_bootstrap(1, 0, 41), tree_bootstrap(1, 1, 41));
    }
}
