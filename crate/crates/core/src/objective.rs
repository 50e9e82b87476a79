//! Response surfaces and the weighted composite objective.
//!
//! The composite objective is
//! `COF(s, f, d) = sum_k w_k * response_k(s, f, d) / normalizer_k`
//! over the five responses, minimized inside an axis-aligned box.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{fit_scaling, Dataset, Point, Response, ScalingParams, TargetRange};
use crate::error::{Error, Result};
use crate::learners::{fit_pr, PolynomialModel, N_COEF};

/// The five published second-order surfaces, on symmetric-scaled inputs, in
/// basis order `[1, s, f, d, s², f², d², sf, sd, fd]` and response order
/// `Ra, F, CWL, CWW, FW`. Literals are kept at their printed precision.
pub const PRINTED_COEFFICIENTS: [[f64; N_COEF]; 5] = [
    [0.51, -0.05, 0.19, 0.03, -0.004, 0.006, 0.016, 0.09, 0.0005, -0.005],
    [106.28, -0.39, 33.69, 25.38, -22.0, 14.9, 21.38, 21.95, 2.91, -4.22],
    [0.43, 0.007, 0.12, 0.11, -0.06, 0.03, 0.02, 0.06, 0.008, -0.0003],
    [0.07, -0.02, 0.04, 0.02, -0.002, 0.002, 0.006, -0.004, -0.002, 0.004],
    [0.06, 0.004, 0.008, 0.004, 0.004, -0.003, -0.006, 0.006, -0.001, -0.002],
];

/// Optimum reported alongside every optimization run for comparison.
pub const REPORTED_OPTIMUM: Point = [60.0, 0.04, 0.2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Printed,
    Refit,
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(Provenance::Printed),
            "refit" => Ok(Provenance::Refit),
            _ => Err(Error::InvalidParameter(format!("unknown surface set `{s}`"))),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Printed => "printed",
            Provenance::Refit => "refit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSurfaceSet {
    pub provenance: Provenance,
    /// One surface per response, in [`Response::ALL`] order.
    pub surfaces: Vec<PolynomialModel>,
}

impl ResponseSurfaceSet {
    pub fn printed(scaling: ScalingParams) -> Self {
        Self {
            provenance: Provenance::Printed,
            surfaces: PRINTED_COEFFICIENTS
                .iter()
                .map(|c| PolynomialModel::from_coefficients(*c, scaling))
                .collect(),
        }
    }

    /// Printed surfaces on symmetric scaling fitted to the shipped table.
    pub fn printed_default() -> Self {
        let scaling = fit_scaling(&Dataset::bundled(), TargetRange::Symmetric)
            .expect("shipped table has non-constant features");
        Self::printed(scaling)
    }

    pub fn refit(train: &Dataset, scaling: &ScalingParams) -> Result<Self> {
        let surfaces = Response::ALL
            .iter()
            .map(|&r| fit_pr(train, r, scaling))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            provenance: Provenance::Refit,
            surfaces,
        })
    }

    pub fn surface(&self, response: Response) -> &PolynomialModel {
        &self.surfaces[response.index()]
    }

    pub fn eval(&self, response: Response, point: &Point) -> f64 {
        self.surface(response).predict(point)
    }

    /// Evaluates a surface by response name.
    pub fn eval_named(&self, name: &str, point: &Point) -> Result<f64> {
        Ok(self.eval(name.parse()?, point))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Point,
    pub upper: Point,
}

impl Bounds {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        if (0..3).any(|i| !(upper[i] > lower[i]) || !lower[i].is_finite() || !upper[i].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degenerate bounds {lower:?}..{upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// 40..90 m/min, 0.04..0.16 mm/rev, 0.2..0.5 mm.
    pub fn machining() -> Self {
        Self {
            lower: [40.0, 0.04, 0.2],
            upper: [90.0, 0.16, 0.5],
        }
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Inclusive containment, with a relative slack of 1e-12 of the width.
    pub fn contains(&self, point: &Point) -> bool {
        (0..3).all(|i| {
            let slack = 1e-12 * self.width(i);
            point[i] >= self.lower[i] - slack && point[i] <= self.upper[i] + slack
        })
    }

    pub fn clamp(&self, point: &Point) -> Point {
        let mut out = *point;
        for (i, v) in out.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    /// w1..w5 in response order; non-negative, summing to 1.
    pub weights: [f64; 5],
    /// Response-unit divisors in response order; strictly positive.
    pub normalizers: [f64; 5],
    pub bounds: Bounds,
}

impl ObjectiveSpec {
    pub fn new(weights: [f64; 5], normalizers: [f64; 5], bounds: Bounds) -> Result<Self> {
        let spec = Self {
            weights,
            normalizers,
            bounds,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Equal weights, normalizers at the dataset column maxima, machining box.
    pub fn with_column_max(data: &Dataset) -> Result<Self> {
        Self::new([0.2; 5], column_max_normalizers(data)?, Bounds::machining())
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weights must be non-negative: {:?}",
                self.weights
            )));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        if self.normalizers.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normalizers must be positive: {:?}",
                self.normalizers
            )));
        }
        Ok(())
    }
}

pub fn column_max_normalizers(data: &Dataset) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for r in Response::ALL {
        out[r.index()] = data.column_max(r).ok_or(Error::EmptyDataset)?;
    }
    Ok(out)
}

fn cof_unchecked(spec: &ObjectiveSpec, set: &ResponseSurfaceSet, point: &Point) -> f64 {
    Response::ALL
        .iter()
        .map(|&r| spec.weights[r.index()] * set.eval(r, point) / spec.normalizers[r.index()])
        .sum()
}

/// Composite objective at a point inside the spec's bounds.
pub fn cof(spec: &ObjectiveSpec, set: &ResponseSurfaceSet, point: &Point) -> Result<f64> {
    spec.validate()?;
    if !spec.bounds.contains(point) {
        return Err(Error::OutOfBounds(*point));
    }
    Ok(cof_unchecked(spec, set, point))
}

/// A validated composite objective, ready for the optimizers.
#[derive(Debug, Clone)]
pub struct Cof {
    spec: ObjectiveSpec,
    set: ResponseSurfaceSet,
}

impl Cof {
    pub fn new(spec: ObjectiveSpec, set: ResponseSurfaceSet) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec, set })
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn surfaces(&self) -> &ResponseSurfaceSet {
        &self.set
    }

    pub fn bounds(&self) -> &Bounds {
        &self.spec.bounds
    }

    pub fn value(&self, point: &Point) -> Result<f64> {
        cof(&self.spec, &self.set, point)
    }
}

impl crate::gco::Objective for Cof {
    /// Points are clamped into the box first.
    fn evaluate(&self, point: &Point) -> f64 {
        cof_unchecked(&self.spec, &self.set, &self.spec.bounds.clamp(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn center() -> Point {
        let set = ResponseSurfaceSet::printed_default();
        set.surfaces[0].scaling.unscale_point(&[0.0; 3])
    }

    #[test]
    fn printed_intercepts_at_center() {
        let set = ResponseSurfaceSet::printed_default();
        let c = center();
        assert!((set.eval(Response::Ra, &c) - 0.51).abs() < 1e-12);
        assert!((set.eval(Response::F, &c) - 106.28).abs() < 1e-12);
        assert!((set.eval(Response::Fw, &c) - 0.06).abs() < 1e-12);
        assert_eq!(set.eval_named("FW", &c).unwrap(), set.eval(Response::Fw, &c));
        assert!(matches!(set.eval_named("Vb", &c), Err(Error::UnknownResponse(_))));
        for (surface, printed) in set.surfaces.iter().zip(PRINTED_COEFFICIENTS) {
            assert_eq!(surface.coefficients(), printed);
        }
    }

    #[test]
    fn zero_surface_is_zero() {
        let mut set = ResponseSurfaceSet::printed_default();
        set.surfaces[2] = PolynomialModel::from_coefficients([0.0; N_COEF], set.surfaces[2].scaling);
        assert_eq!(set.eval(Response::CwL, &[73.0, 0.1, 0.33]), 0.0);
    }

    #[test]
    fn unity_when_responses_equal_normalizers() {
        let set = ResponseSurfaceSet::printed_default();
        let p = [60.0, 0.04, 0.2];
        let mut normalizers = [0.0; 5];
        for r in Response::ALL {
            normalizers[r.index()] = set.eval(r, &p);
        }
        let spec = ObjectiveSpec::new([0.2; 5], normalizers, Bounds::machining()).unwrap();
        assert!((cof(&spec, &set, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_weight_collapses_to_ratio() {
        let data = Dataset::bundled();
        let set = ResponseSurfaceSet::printed_default();
        let base = ObjectiveSpec::with_column_max(&data).unwrap();
        let spec = ObjectiveSpec::new([1.0, 0.0, 0.0, 0.0, 0.0], base.normalizers, base.bounds).unwrap();
        let p = [70.0, 0.1, 0.3];
        let expected = set.eval(Response::Ra, &p) / 0.89;
        assert!((cof(&spec, &set, &p).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn default_normalizers_are_column_maxima() {
        let spec = ObjectiveSpec::with_column_max(&Dataset::bundled()).unwrap();
        assert_eq!(spec.normalizers, [0.89, 202.99, 0.699, 0.159, 0.08]);
        assert_eq!(spec.weights, [0.2; 5]);
    }

    #[test]
    fn rejects_bad_specs_and_points() {
        let set = ResponseSurfaceSet::printed_default();
        let spec = ObjectiveSpec::with_column_max(&Dataset::bundled()).unwrap();
        assert!(matches!(cof(&spec, &set, &[95.0, 0.1, 0.3]), Err(Error::OutOfBounds(_))));
        assert!(cof(&spec, &set, &[90.0, 0.16, 0.5]).is_ok());
        let mut bad = spec;
        bad.normalizers[1] = 0.0;
        assert!(cof(&bad, &set, &[60.0, 0.1, 0.3]).is_err());
        assert!(ObjectiveSpec::new([0.5; 5], spec.normalizers, spec.bounds).is_err());
        assert!(ObjectiveSpec::new([1.5, -0.5, 0.0, 0.0, 0.0], spec.normalizers, spec.bounds).is_err());
    }

    #[test]
    fn refit_training_fit_matches_least_squares_oracle() {
        // training R² of an independent least-squares solve on the D1 train rows
        let oracle = [
            (Response::Ra, 0.8432938813512366),
            (Response::F, 0.8776729142852056),
            (Response::CwL, 0.9151363209866502),
            (Response::CwW, 0.9465484122870589),
            (Response::Fw, 0.9676602634126626),
        ];
        let data = Dataset::bundled();
        let (train, _) = crate::data::make_split(&data, &crate::data::SplitSpec::d1()).unwrap();
        let scaling = fit_scaling(&train, TargetRange::Symmetric).unwrap();
        let set = ResponseSurfaceSet::refit(&train, &scaling).unwrap();
        assert_eq!(set.provenance, Provenance::Refit);
        for (r, expected) in oracle {
            let actual = train.targets(r);
            let pred: Vec<f64> = train.features().iter().map(|p| set.eval(r, p)).collect();
            let r2 = crate::metrics::r2(&actual, &pred).unwrap();
            assert!((r2 - expected).abs() < 1e-9, "{r}: training R² {r2}");
        }
    }

    fn simplex() -> impl Strategy<Value = [f64; 5]> {
        proptest::array::uniform5(0.0f64..1.0).prop_filter_map("non-zero", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| w.map(|v| v / s))
        })
    }

    fn in_box() -> impl Strategy<Value = Point> {
        (40.0f64..=90.0, 0.04f64..=0.16, 0.2f64..=0.5).prop_map(|(s, f, d)| [s, f, d])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn linear_in_weights(w in simplex(), v in simplex(), alpha in 0.0f64..=1.0, p in in_box()) {
            let set = ResponseSurfaceSet::printed_default();
            let base = ObjectiveSpec::with_column_max(&Dataset::bundled()).unwrap();
            let mut mix = [0.0; 5];
            for k in 0..5 {
                mix[k] = alpha * w[k] + (1.0 - alpha) * v[k];
            }
            let at = |weights: [f64; 5]| {
                let spec = ObjectiveSpec { weights, ..base };
                cof_unchecked(&spec, &set, &p)
            };
            let lhs = at(mix);
            let rhs = alpha * at(w) + (1.0 - alpha) * at(v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn argmin_survives_normalizer_scaling(k in 1e-3f64..1e3, r in 0usize..5, pts in proptest::collection::vec(in_box(), 2..30)) {
            let set = ResponseSurfaceSet::printed_default();
            let base = ObjectiveSpec::with_column_max(&Dataset::bundled()).unwrap();
            let mut weights = [0.0; 5];
            weights[r] = 1.0;
            let spec = ObjectiveSpec { weights, ..base };
            let mut scaled = spec;
            scaled.normalizers[r] *= k;
            let argmin = |s: &ObjectiveSpec| {
                pts.iter()
                    .enumerate()
                    .min_by(|a, b| cof_unchecked(s, &set, a.1).total_cmp(&cof_unchecked(s, &set, b.1)))
                    .map(|(i, _)| i)
                    .unwrap()
            };
            let a = argmin(&spec);
            let b = argmin(&scaled);
            // exact ties can break either way after rescaling
            let va = cof_unchecked(&spec, &set, &pts[a]);
            let vb = cof_unchecked(&spec, &set, &pts[b]);
            prop_assert!(a == b || (va - vb).abs() <= 1e-12 * va.abs().max(1e-300));
            for p in &pts {
                let ratio = cof_unchecked(&scaled, &set, p) / cof_unchecked(&spec, &set, p);
                let v = cof_unchecked(&spec, &set, p);
                if v.abs() > 1e-9 {
                    prop_assert!((ratio - 1.0 / k).abs() <= 1e-9 / k);
                }
            }
        }
    }
}
