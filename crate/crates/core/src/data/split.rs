use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Dataset, Point};
use crate::error::{Error, Result};

const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    /// Test set is every row at s = 50 m/min.
    #[default]
    D1,
    /// Test set is seven named (s, f, d) combinations.
    D2,
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitName::D1 => "d1",
            SplitName::D2 => "d2",
        })
    }
}

impl FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(SplitName::D1),
            "d2" => Ok(SplitName::D2),
            _ => Err(Error::InvalidParameter(format!("unknown split `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestSelector {
    Speed(f64),
    Triples(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub name: SplitName,
    pub test_selector: TestSelector,
}

impl SplitSpec {
    pub fn d1() -> Self {
        Self {
            name: SplitName::D1,
            test_selector: TestSelector::Speed(50.0),
        }
    }

    pub fn d2() -> Self {
        Self {
            name: SplitName::D2,
            test_selector: TestSelector::Triples(vec![
                [40.0, 0.04, 0.2],
                [50.0, 0.06, 0.2],
                [55.0, 0.16, 0.4],
                [60.0, 0.14, 0.5],
                [70.0, 0.12, 0.2],
                [80.0, 0.1, 0.5],
                [90.0, 0.06, 0.4],
            ]),
        }
    }

    pub fn named(name: SplitName) -> Self {
        match name {
            SplitName::D1 => Self::d1(),
            SplitName::D2 => Self::d2(),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL
}

/// Partitions `data` into (train, test), both in file order.
pub fn make_split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let fail = |reason: String| Error::Split {
        split: spec.name.to_string(),
        reason,
    };
    let mut is_test = vec![false; data.len()];
    match &spec.test_selector {
        TestSelector::Speed(speed) => {
            for (flag, sample) in is_test.iter_mut().zip(data.samples()) {
                *flag = close(sample.s, *speed);
            }
            if !is_test.iter().any(|&t| t) {
                return Err(fail(format!("no rows with s = {speed}")));
            }
        }
        TestSelector::Triples(triples) => {
            for triple in triples {
                let hits: Vec<usize> = data
                    .samples()
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| (0..3).all(|k| close(s.features()[k], triple[k])))
                    .map(|(i, _)| i)
                    .collect();
                match hits.as_slice() {
                    [i] => is_test[*i] = true,
                    [] => return Err(fail(format!("no row matches {triple:?}"))),
                    many => {
                        return Err(fail(format!("{} rows match {triple:?}", many.len())));
                    }
                }
            }
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| is_test[i]);
    Ok((data.select(&train), data.select(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MachiningSample;
    use proptest::prelude::*;

    #[test]
    fn d1_on_bundled() {
        let (train, test) = make_split(&Dataset::bundled(), &SplitSpec::d1()).unwrap();
        assert_eq!(test.len(), 7);
        assert_eq!(train.len(), 41);
        let labels: Vec<u32> = test.samples().iter().map(|s| s.sl).collect();
        assert_eq!(labels, (8..=14).collect::<Vec<_>>());
    }

    #[test]
    fn d2_on_bundled() {
        let (train, test) = make_split(&Dataset::bundled(), &SplitSpec::d2()).unwrap();
        assert_eq!(test.len(), 7);
        assert_eq!(train.len(), 41);
        assert!(test.samples().iter().any(|s| s.features() == [90.0, 0.06, 0.4]));
        let labels: Vec<u32> = test.samples().iter().map(|s| s.sl).collect();
        assert_eq!(labels, vec![1, 9, 21, 27, 33, 39, 47]);
    }

    #[test]
    fn d1_without_speed_50_fails() {
        let data = Dataset::bundled();
        let keep: Vec<usize> = (0..data.len()).filter(|&i| data.samples()[i].s != 50.0).collect();
        let err = make_split(&data.select(&keep), &SplitSpec::d1()).unwrap_err();
        assert!(matches!(err, Error::Split { .. }));
    }

    #[test]
    fn ambiguous_triple_fails() {
        let data = Dataset::bundled();
        let mut dup: Vec<MachiningSample> = data.samples().to_vec();
        let mut extra = dup[0];
        extra.sl = 1000;
        dup.push(extra);
        let data = Dataset::new(dup).unwrap();
        assert!(make_split(&data, &SplitSpec::d2()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        // Random sub-datasets that keep every D2 row and at least one s = 50 row.
        #[test]
        fn splits_partition(mask in proptest::collection::vec(any::<bool>(), 48), d2 in any::<bool>()) {
            let data = Dataset::bundled();
            let keep: Vec<usize> = (0..data.len())
                .filter(|&i| {
                    let sl = data.samples()[i].sl;
                    mask[i] || [1, 8, 9, 21, 27, 33, 39, 47].contains(&sl)
                })
                .collect();
            let data = data.select(&keep);
            let spec = if d2 { SplitSpec::d2() } else { SplitSpec::d1() };
            let (train, test) = make_split(&data, &spec).unwrap();
            prop_assert_eq!(train.len() + test.len(), data.len());
            for t in test.samples() {
                prop_assert!(!train.samples().iter().any(|r| r.sl == t.sl));
            }
            let mut all: Vec<u32> = train.samples().iter().chain(test.samples()).map(|s| s.sl).collect();
            all.sort_unstable();
            let expected: Vec<u32> = data.samples().iter().map(|s| s.sl).collect();
            prop_assert_eq!(all, expected);
        }
    }
}
