//! Experimental dataset: ingestion, validation, scaling and train/test splits.
//!
//! The file format is plain comma-separated text with the fixed header
//! `sl,s,f,d,Ra,F,CWL,CWW,FW`, one sample per line, no quoting and no
//! comments.

mod scaling;
mod split;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use scaling::{fit_scaling, inverse_scale, scale, ScalingParams, TargetRange};
pub use split::{make_split, SplitName, SplitSpec, TestSelector};

/// A process-parameter point in raw units: (speed m/min, feed mm/rev, depth mm).
pub type Point = [f64; 3];

pub const HEADER: &str = "sl,s,f,d,Ra,F,CWL,CWW,FW";

/// The table as shipped with the crate, byte-for-byte.
pub const BUNDLED_CSV: &str = include_str!("../../data/hard_turning.csv");

pub const SPEED_LEVELS: [f64; 7] = [40.0, 50.0, 55.0, 60.0, 70.0, 80.0, 90.0];
pub const DEPTH_LEVELS: [f64; 4] = [0.2, 0.3, 0.4, 0.5];
pub const FEED_LEVELS: [f64; 7] = [0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16];
pub const MAX_FEED: f64 = 0.2;

/// Shortest run of identical consecutive response values treated as a
/// placeholder artifact in strict mode.
pub const FROZEN_RUN: usize = 10;

const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feature {
    Speed,
    Feed,
    Depth,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Speed, Feature::Feed, Feature::Depth];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Speed => "s",
            Feature::Feed => "f",
            Feature::Depth => "d",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Response {
    Ra,
    F,
    #[serde(rename = "CWL")]
    CwL,
    #[serde(rename = "CWW")]
    CwW,
    #[serde(rename = "FW")]
    Fw,
}

impl Response {
    pub const ALL: [Response; 5] = [
        Response::Ra,
        Response::F,
        Response::CwL,
        Response::CwW,
        Response::Fw,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Response::Ra => "Ra",
            Response::F => "F",
            Response::CwL => "CWL",
            Response::CwW => "CWW",
            Response::Fw => "FW",
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "").as_str() {
            "RA" => Ok(Response::Ra),
            "F" => Ok(Response::F),
            "CWL" | "CL" => Ok(Response::CwL),
            "CWW" | "CW" => Ok(Response::CwW),
            "FW" => Ok(Response::Fw),
            _ => Err(Error::UnknownResponse(s.to_string())),
        }
    }
}

/// One experimental row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachiningSample {
    pub sl: u32,
    pub s: f64,
    pub f: f64,
    pub d: f64,
    pub ra: f64,
    pub force: f64,
    pub cw_l: f64,
    pub cw_w: f64,
    pub fw: f64,
}

impl MachiningSample {
    pub fn features(&self) -> Point {
        [self.s, self.f, self.d]
    }

    pub fn response(&self, response: Response) -> f64 {
        match response {
            Response::Ra => self.ra,
            Response::F => self.force,
            Response::CwL => self.cw_l,
            Response::CwW => self.cw_w,
            Response::Fw => self.fw,
        }
    }

    fn numeric(&self) -> [(&'static str, f64); 8] {
        [
            ("s", self.s),
            ("f", self.f),
            ("d", self.d),
            ("Ra", self.ra),
            ("F", self.force),
            ("CWL", self.cw_l),
            ("CWW", self.cw_w),
            ("FW", self.fw),
        ]
    }
}

/// How to treat the printed-table anomalies (off-nominal feed, label gaps,
/// repeated feeds within a speed block, frozen response runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    /// Reject anomalies.
    Strict,
    /// Log anomalies and continue.
    #[default]
    Lenient,
}

/// A soft data-quality finding. Rejected in strict mode, logged otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Anomaly {
    pub row: usize,
    pub sl: u32,
    pub column: &'static str,
    pub reason: String,
}

impl fmt::Display for Anomaly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "row {} (sl. {}): column {}: {}",
            self.row, self.sl, self.column, self.reason
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<MachiningSample>,
}

impl Dataset {
    /// Builds a dataset after the hard checks (positivity, levels, label order).
    pub fn new(samples: Vec<MachiningSample>) -> Result<Self> {
        let mut prev: Option<u32> = None;
        for (i, sample) in samples.iter().enumerate() {
            check_hard(i + 1, sample)?;
            if let Some(p) = prev {
                if sample.sl <= p {
                    return Err(Error::Validation {
                        row: i + 1,
                        sl: sample.sl.to_string(),
                        column: "sl".into(),
                        reason: format!("label {} does not follow {}", sample.sl, p),
                    });
                }
            }
            prev = Some(sample.sl);
        }
        Ok(Self { samples })
    }

    /// The built-in table, loaded leniently.
    pub fn bundled() -> Self {
        parse_dataset(BUNDLED_CSV, Validation::Lenient)
            .expect("shipped dataset passes the hard checks")
    }

    pub fn samples(&self) -> &[MachiningSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn features(&self) -> Vec<Point> {
        self.samples.iter().map(MachiningSample::features).collect()
    }

    pub fn targets(&self, response: Response) -> Vec<f64> {
        self.samples.iter().map(|s| s.response(response)).collect()
    }

    pub fn column_max(&self, response: Response) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.response(response))
            .reduce(f64::max)
    }

    /// Subset by index, preserving order. Indices must be ascending.
    pub(crate) fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i]).collect(),
        }
    }

    /// Soft findings on this dataset; see [`Validation`].
    pub fn anomalies(&self) -> Vec<Anomaly> {
        let mut found = Vec::new();
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1].sl != w[0].sl + 1 {
                found.push(Anomaly {
                    row: i + 2,
                    sl: w[1].sl,
                    column: "sl",
                    reason: format!("label gap: {} follows {}", w[1].sl, w[0].sl),
                });
            }
        }
        for (i, s) in self.samples.iter().enumerate() {
            if !is_level(s.f, &FEED_LEVELS) {
                found.push(Anomaly {
                    row: i + 1,
                    sl: s.sl,
                    column: "f",
                    reason: format!("feed {} is not a nominal level", s.f),
                });
            }
            let earlier = self.samples[..i]
                .iter()
                .any(|o| o.s == s.s && (o.f - s.f).abs() < LEVEL_TOL);
            if earlier {
                found.push(Anomaly {
                    row: i + 1,
                    sl: s.sl,
                    column: "f",
                    reason: format!("feed {} repeated within the s = {} block", s.f, s.s),
                });
            }
        }
        for response in Response::ALL {
            let mut start = 0;
            while start < self.samples.len() {
                let value = self.samples[start].response(response);
                let mut end = start + 1;
                while end < self.samples.len() && self.samples[end].response(response) == value {
                    end += 1;
                }
                if end - start >= FROZEN_RUN {
                    found.push(Anomaly {
                        row: start + 1,
                        sl: self.samples[start].sl,
                        column: response.name(),
                        reason: format!("value {} repeated over {} consecutive rows", value, end - start),
                    });
                }
                start = end;
            }
        }
        found
    }
}

fn is_level(value: f64, levels: &[f64]) -> bool {
    levels.iter().any(|l| (value - l).abs() < LEVEL_TOL)
}

fn check_hard(row: usize, sample: &MachiningSample) -> Result<()> {
    let fail = |column: &str, reason: String| Error::Validation {
        row,
        sl: sample.sl.to_string(),
        column: column.into(),
        reason,
    };
    for (column, value) in sample.numeric() {
        if !value.is_finite() || value <= 0.0 {
            return Err(fail(column, format!("{value} is not finite and positive")));
        }
    }
    if !is_level(sample.s, &SPEED_LEVELS) {
        return Err(fail("s", format!("speed {} is not one of {:?}", sample.s, SPEED_LEVELS)));
    }
    if !is_level(sample.d, &DEPTH_LEVELS) {
        return Err(fail("d", format!("depth {} is not one of {:?}", sample.d, DEPTH_LEVELS)));
    }
    if sample.f > MAX_FEED {
        return Err(fail("f", format!("feed {} exceeds {}", sample.f, MAX_FEED)));
    }
    Ok(())
}

/// Parses dataset text. Row numbers in errors count data rows from 1.
pub fn parse_dataset(text: &str, validation: Validation) -> Result<Dataset> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").trim_end_matches('\r');
    if header != HEADER {
        return Err(Error::Header {
            expected: HEADER.into(),
            found: header.into(),
        });
    }
    let columns: Vec<&str> = HEADER.split(',').collect();

    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::Validation {
                row,
                sl: cells.first().copied().unwrap_or("").to_string(),
                column: "*".into(),
                reason: format!("expected {} cells, found {}", columns.len(), cells.len()),
            });
        }
        let sl: u32 = cells[0].trim().parse().map_err(|_| Error::Parse {
            row,
            column: "sl".into(),
            value: cells[0].into(),
        })?;
        let mut values = [0.0; 8];
        for (k, cell) in cells[1..].iter().enumerate() {
            values[k] = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                column: columns[k + 1].into(),
                value: (*cell).into(),
            })?;
        }
        samples.push(MachiningSample {
            sl,
            s: values[0],
            f: values[1],
            d: values[2],
            ra: values[3],
            force: values[4],
            cw_l: values[5],
            cw_w: values[6],
            fw: values[7],
        });
    }

    let dataset = Dataset::new(samples)?;
    let anomalies = dataset.anomalies();
    match validation {
        Validation::Strict => {
            if let Some(a) = anomalies.into_iter().next() {
                return Err(Error::Validation {
                    row: a.row,
                    sl: a.sl.to_string(),
                    column: a.column.into(),
                    reason: a.reason,
                });
            }
        }
        Validation::Lenient => {
            for a in &anomalies {
                log::warn!("{a}");
            }
        }
    }
    Ok(dataset)
}

pub fn load_dataset(path: &Path, validation: Validation) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_dataset(&text, validation)
}
