//! Regression learners: polynomial response surface, random forest,
//! gradient boosting and AdaBoost.R2, plus model persistence.

mod adaboost;
mod ensemble;
mod forest;
mod gboost;
mod poly;
pub mod rng;
mod sweep;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Point, Response, ScalingParams};
use crate::error::{Error, Result};

pub use adaboost::fit_ab;
pub use ensemble::{weighted_median, EnsembleKind, EnsembleModel, EnsembleParams};
pub use forest::{bootstrap_indices, fit_rf, fit_rf_with, tree_bootstrap, ForestOptions, BAGGED_FEATURES};
pub use gboost::fit_gb;
pub use poly::{basis, fit_pr, fit_pr_points, PolynomialModel, N_COEF, RIDGE};
pub use sweep::{sweep_rf, SweepCell, SweepResult};
pub use tree::{best_split, fit_tree, SplitCandidate, TreeNode, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Pr,
    Rf,
    Gb,
    Ab,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [LearnerKind::Pr, LearnerKind::Rf, LearnerKind::Ab, LearnerKind::Gb];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Pr => "pr",
            LearnerKind::Rf => "rf",
            LearnerKind::Gb => "gb",
            LearnerKind::Ab => "ab",
        }
    }

    /// Row label used in metrics tables.
    pub fn label(self) -> &'static str {
        match self {
            LearnerKind::Pr => "PR",
            LearnerKind::Rf => "RF",
            LearnerKind::Gb => "GB",
            LearnerKind::Ab => "ADA",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pr" => Ok(LearnerKind::Pr),
            "rf" => Ok(LearnerKind::Rf),
            "gb" => Ok(LearnerKind::Gb),
            "ab" | "ada" => Ok(LearnerKind::Ab),
            _ => Err(Error::InvalidParameter(format!("unknown learner `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Polynomial(PolynomialModel),
    Ensemble(EnsembleModel),
}

impl Model {
    pub fn predict(&self, point: &Point) -> f64 {
        match self {
            Model::Polynomial(m) => m.predict(point),
            Model::Ensemble(m) => m.predict(point),
        }
    }

    pub fn scaling(&self) -> &ScalingParams {
        match self {
            Model::Polynomial(m) => &m.scaling,
            Model::Ensemble(m) => &m.scaling,
        }
    }
}

/// Fits one learner for one response. `params` is ignored by PR.
pub fn fit_model(
    kind: LearnerKind,
    train: &Dataset,
    response: Response,
    scaling: &ScalingParams,
    params: &EnsembleParams,
) -> Result<Model> {
    let fitted = match kind {
        LearnerKind::Pr => fit_pr(train, response, scaling).map(Model::Polynomial),
        LearnerKind::Rf => fit_rf(train, response, scaling, params).map(Model::Ensemble),
        LearnerKind::Gb => fit_gb(train, response, scaling, params).map(Model::Ensemble),
        LearnerKind::Ab => fit_ab(train, response, scaling, params).map(Model::Ensemble),
    };
    fitted.map_err(|e| Error::fit(format!("fitting {kind} for {response}"), e))
}

pub const MODEL_FORMAT: &str = "hardturn-model/1";

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub config_hash: String,
    pub learner: LearnerKind,
    pub response: Response,
    pub model: Model,
}

impl ModelFile {
    pub fn new(learner: LearnerKind, response: Response, model: Model, config_hash: &str) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            config_hash: config_hash.into(),
            learner,
            response,
            model,
        }
    }

    pub fn to_text(&self) -> String {
        crate::io::to_text(self)
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let file: ModelFile = crate::io::from_text(text, path)?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Document {
                path: path.to_path_buf(),
                reason: format!("unsupported format `{}`", file.format),
            });
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read(path)?;
        Self::from_text(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write(path, &self.to_text())
    }
}
