use serde::{Deserialize, Serialize};

use super::{Dataset, Feature, Point};
use crate::error::{Error, Result};

/// Target interval of the min-max transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetRange {
    /// [0, 1]
    Unit,
    /// [-1, 1]
    #[default]
    Symmetric,
}

impl std::str::FromStr for TargetRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unit" => Ok(TargetRange::Unit),
            "symmetric" => Ok(TargetRange::Symmetric),
            _ => Err(Error::InvalidParameter(format!("unknown scaling range `{s}`"))),
        }
    }
}

/// Per-feature column extrema used by the min-max transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Point,
    pub max: Point,
    pub range: TargetRange,
}

impl ScalingParams {
    pub fn new(min: Point, max: Point, range: TargetRange) -> Result<Self> {
        for feature in Feature::ALL {
            let i = feature.index();
            if !(max[i] > min[i]) {
                return Err(Error::ConstantColumn {
                    feature: feature.name().into(),
                    value: min[i],
                });
            }
        }
        Ok(Self { min, max, range })
    }

    pub fn scale_point(&self, point: &Point) -> Point {
        let mut out = [0.0; 3];
        for feature in Feature::ALL {
            out[feature.index()] = scale(point[feature.index()], feature, self);
        }
        out
    }

    pub fn unscale_point(&self, scaled: &Point) -> Point {
        let mut out = [0.0; 3];
        for feature in Feature::ALL {
            out[feature.index()] = inverse_scale(scaled[feature.index()], feature, self);
        }
        out
    }

    /// Whether a raw point lies inside the fitted column ranges.
    pub fn covers(&self, point: &Point) -> bool {
        (0..3).all(|i| point[i] >= self.min[i] && point[i] <= self.max[i])
    }
}

pub fn fit_scaling(data: &Dataset, range: TargetRange) -> Result<ScalingParams> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for sample in data.samples() {
        let x = sample.features();
        for i in 0..3 {
            min[i] = min[i].min(x[i]);
            max[i] = max[i].max(x[i]);
        }
    }
    ScalingParams::new(min, max, range)
}

/// Min-max transform of one raw value. Values outside the fitted range map
/// outside the target interval.
pub fn scale(value: f64, feature: Feature, params: &ScalingParams) -> f64 {
    let i = feature.index();
    let unit = (value - params.min[i]) / (params.max[i] - params.min[i]);
    match params.range {
        TargetRange::Unit => unit,
        TargetRange::Symmetric => 2.0 * unit - 1.0,
    }
}

pub fn inverse_scale(scaled: f64, feature: Feature, params: &ScalingParams) -> f64 {
    let i = feature.index();
    let unit = match params.range {
        TargetRange::Unit => scaled,
        TargetRange::Symmetric => (scaled + 1.0) / 2.0,
    };
    params.min[i] + unit * (params.max[i] - params.min[i])
}
