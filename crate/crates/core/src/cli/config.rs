use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{SplitName, TargetRange};
use crate::error::{Error, Result};
use crate::gco::{GcoConfig, DEFAULT_BUDGET};
use crate::learners::{EnsembleParams, LearnerKind};
use crate::objective::Provenance;

/// `all` or a single learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LearnerSelection {
    #[default]
    All,
    One(LearnerKind),
}

impl LearnerSelection {
    pub fn kinds(self) -> Vec<LearnerKind> {
        match self {
            LearnerSelection::All => LearnerKind::ALL.to_vec(),
            LearnerSelection::One(k) => vec![k],
        }
    }
}

impl fmt::Display for LearnerSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSelection::All => f.write_str("all"),
            LearnerSelection::One(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for LearnerSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            Ok(LearnerSelection::All)
        } else {
            s.parse().map(LearnerSelection::One)
        }
    }
}

impl From<LearnerSelection> for String {
    fn from(v: LearnerSelection) -> Self {
        v.to_string()
    }
}

impl TryFrom<String> for LearnerSelection {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// COF normalizers: dataset column maxima, or five explicit values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Normalizers {
    #[default]
    Max,
    Custom([f64; 5]),
}

impl fmt::Display for Normalizers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalizers::Max => f.write_str("max"),
            Normalizers::Custom(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for Normalizers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("max") {
            return Ok(Normalizers::Max);
        }
        match s.strip_prefix("custom:") {
            Some(rest) => parse_five(rest).map(Normalizers::Custom),
            None => Err(Error::InvalidParameter(format!(
                "normalizers must be `max` or `custom:a,b,c,d,e`, got `{s}`"
            ))),
        }
    }
}

impl From<Normalizers> for String {
    fn from(v: Normalizers) -> Self {
        v.to_string()
    }
}

impl TryFrom<String> for Normalizers {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

pub(crate) fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("`{t}` is not a number")))
        })
        .collect()
}

pub fn parse_five(text: &str) -> Result<[f64; 5]> {
    let v = parse_list(text)?;
    v.try_into()
        .map_err(|v: Vec<f64>| Error::InvalidParameter(format!("expected 5 values, got {}", v.len())))
}

pub fn parse_point(text: &str) -> Result<[f64; 3]> {
    let v = parse_list(text)?;
    v.try_into()
        .map_err(|v: Vec<f64>| Error::InvalidParameter(format!("expected s,f,d, got {} values", v.len())))
}

/// Everything a run depends on. Serialized verbatim to `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset file; `None` uses the bundled table.
    pub data: Option<PathBuf>,
    pub split: SplitName,
    pub scaling: TargetRange,
    /// Reject the table on any detected anomaly.
    pub strict: bool,
    pub learner: LearnerSelection,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Ra, F, CW_L, CW_W, FW.
    pub weights: [f64; 5],
    pub normalizers: Normalizers,
    pub surfaces: Provenance,
    pub gco: GcoConfig,
    pub restarts: usize,
    pub grid_resolution: [usize; 3],
    pub grid_budget: usize,
    /// Also report the GCO point with speed snapped to a tested level.
    pub snap: bool,
    pub sweep_trees: Vec<usize>,
    pub sweep_depths: Vec<usize>,
    /// Output directory; not part of the config hash.
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ensemble = EnsembleParams::default();
        Self {
            data: None,
            split: SplitName::D1,
            scaling: TargetRange::Symmetric,
            strict: false,
            learner: LearnerSelection::All,
            n_trees: ensemble.n_trees,
            max_depth: ensemble.max_depth,
            min_leaf: ensemble.min_leaf,
            learning_rate: ensemble.learning_rate,
            seed: 0,
            weights: [0.2; 5],
            normalizers: Normalizers::Max,
            surfaces: Provenance::Printed,
            gco: GcoConfig::default(),
            restarts: 10,
            grid_resolution: [51, 49, 31],
            grid_budget: DEFAULT_BUDGET,
            snap: false,
            sweep_trees: vec![1, 2, 5, 10, 20, 50],
            sweep_depths: vec![1, 2, 4, 6, 8, 10, 12],
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn ensemble_params(&self) -> EnsembleParams {
        EnsembleParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }

    /// First 16 hex digits of SHA-256 over the config (without `out`) and the dataset bytes.
    pub fn hash(&self, dataset: &[u8]) -> String {
        let hashed = RunConfig {
            out: PathBuf::new(),
            ..self.clone()
        };
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&hashed).expect("config serializes"));
        h.update([0u8]);
        h.update(dataset);
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
