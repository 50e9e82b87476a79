//! Command implementations. Every command resolves a [`RunConfig`], writes
//! `config.json` plus a `run.meta.json` sidecar (the only file carrying a
//! timestamp), and stamps each output with the config hash.

mod args;
mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::data::{fit_scaling, make_split, parse_dataset, Dataset, Point, Response, SplitSpec, Validation, BUNDLED_CSV};
use crate::error::{Error, Result};
use crate::gco::{gco_optimize, grid_search, grid_spacing, multi_start_report, snap_speed, within_cells, MultiStartSummary, OptimizationResult};
use crate::learners::{fit_model, sweep_rf, LearnerKind, ModelFile, SweepResult};
use crate::metrics::{MetricsReport, ResponseMetrics};
use crate::objective::{column_max_normalizers, Bounds, Cof, ObjectiveSpec, Provenance, ResponseSurfaceSet, REPORTED_OPTIMUM};

pub use args::{run, Cli, Command, Overrides};
pub use config::{parse_five, parse_point, LearnerSelection, Normalizers, RunConfig};

pub const CONFIG_FILE: &str = "config.json";
pub const META_FILE: &str = "run.meta.json";

/// A config together with the dataset it resolves to.
pub struct Run {
    pub config: RunConfig,
    pub dataset: Dataset,
    pub hash: String,
}

impl Run {
    pub fn new(config: RunConfig) -> Result<Self> {
        let text = match &config.data {
            Some(path) => crate::io::read(path)?,
            None => BUNDLED_CSV.to_string(),
        };
        let validation = if config.strict { Validation::Strict } else { Validation::Lenient };
        let dataset = parse_dataset(&text, validation)?;
        let hash = config.hash(text.as_bytes());
        Ok(Self { config, dataset, hash })
    }

    fn out(&self, name: impl AsRef<Path>) -> PathBuf {
        self.config.out.join(name)
    }

    fn split(&self) -> Result<(Dataset, Dataset)> {
        make_split(&self.dataset, &SplitSpec::named(self.config.split))
    }

    fn header(&self) -> String {
        format!("# config_hash: {}\n", self.hash)
    }

    fn write_config(&self, command: &str) -> Result<()> {
        let doc = ConfigDocument {
            config_hash: self.hash.clone(),
            config: self.config.clone(),
        };
        crate::io::write(&self.out(CONFIG_FILE), &crate::io::to_text(&doc))?;
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = RunMeta {
            config_hash: self.hash.clone(),
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix,
        };
        crate::io::write(&self.out(META_FILE), &crate::io::to_text(&meta))
    }

    /// Printed surfaces use scaling fitted on the whole table; refit
    /// surfaces are fitted on the train split with its own scaling.
    pub fn surfaces(&self) -> Result<ResponseSurfaceSet> {
        match self.config.surfaces {
            Provenance::Printed => Ok(ResponseSurfaceSet::printed(fit_scaling(&self.dataset, self.config.scaling)?)),
            Provenance::Refit => {
                let (train, _) = self.split()?;
                let scaling = fit_scaling(&train, self.config.scaling)?;
                ResponseSurfaceSet::refit(&train, &scaling)
            }
        }
    }

    pub fn objective(&self) -> Result<Cof> {
        let normalizers = match self.config.normalizers {
            Normalizers::Max => column_max_normalizers(&self.dataset)?,
            Normalizers::Custom(v) => v,
        };
        let spec = ObjectiveSpec::new(self.config.weights, normalizers, Bounds::machining())?;
        Cof::new(spec, self.surfaces()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub config_hash: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config_hash: String,
    pub command: String,
    pub version: String,
    pub created_unix: u64,
}

fn model_path(out: &Path, learner: LearnerKind, response: Response) -> PathBuf {
    out.join("models").join(format!("{}_{}.json", learner, response.name()))
}

/// Fits the selected learners for all five responses and writes models and
/// test-set metrics (`metrics.csv`, `metrics.txt`).
pub fn cmd_train(run: &Run) -> Result<Vec<(LearnerKind, MetricsReport)>> {
    let (train, test) = run.split()?;
    let scaling = fit_scaling(&train, run.config.scaling)?;
    let params = run.config.ensemble_params();
    let points = test.features();
    let mut reports = Vec::new();
    for kind in run.config.learner.kinds() {
        let mut rows = Vec::with_capacity(Response::ALL.len());
        for response in Response::ALL {
            let model = fit_model(kind, &train, response, &scaling, &params)?;
            let predicted: Vec<f64> = points.iter().map(|p| model.predict(p)).collect();
            let metrics = ResponseMetrics::evaluate(response, &test.targets(response), &predicted)
                .map_err(|e| Error::fit(format!("scoring {kind} for {response}"), e))?;
            ModelFile::new(kind, response, model, &run.hash).save(&model_path(&run.config.out, kind, response))?;
            rows.push(metrics);
        }
        info!("trained {kind} on {} rows, tested on {}", train.len(), test.len());
        reports.push((kind, MetricsReport { rows }));
    }
    run.write_config("train")?;
    crate::io::write(&run.out("metrics.csv"), &metrics_csv(run, &reports))?;
    crate::io::write(&run.out("metrics.txt"), &metrics_table(run, &reports))?;
    Ok(reports)
}

fn metrics_csv(run: &Run, reports: &[(LearnerKind, MetricsReport)]) -> String {
    let mut s = run.header();
    s.push_str("learner,response,r2,mse,mae,n\n");
    for (kind, report) in reports {
        for m in &report.rows {
            let _ = writeln!(s, "{},{},{},{},{},{}", kind.label(), m.response, m.r2, m.mse, m.mae, m.n);
        }
    }
    s
}

pub fn metrics_table(run: &Run, reports: &[(LearnerKind, MetricsReport)]) -> String {
    let mut s = run.header();
    let _ = writeln!(s, "# split: {}, scaling: {:?}", run.config.split, run.config.scaling);
    let _ = writeln!(s, "{:<6}{:<10}{:>12}{:>14}{:>14}", "Model", "Response", "R2", "MSE", "MAE");
    for (kind, report) in reports {
        for m in &report.rows {
            let _ = writeln!(
                s,
                "{:<6}{:<10}{:>12.4}{:>14.4e}{:>14.4e}",
                kind.label(),
                m.response.name(),
                m.r2,
                m.mse,
                m.mae
            );
        }
    }
    s
}

pub enum PredictSource {
    Model(PathBuf),
    Surface(Response),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    /// The point lies outside the feature ranges the model was fitted on.
    pub extrapolated: bool,
}

pub fn cmd_predict(run: &Run, source: &PredictSource, point: &Point) -> Result<Prediction> {
    let (value, scaling) = match source {
        PredictSource::Model(path) => {
            let file = ModelFile::load(path)?;
            (file.model.predict(point), *file.model.scaling())
        }
        PredictSource::Surface(response) => {
            let set = run.surfaces()?;
            let surface = set.surface(*response);
            (surface.predict(point), surface.scaling)
        }
    };
    let extrapolated = !scaling.covers(point);
    if extrapolated {
        warn!("{point:?} lies outside the fitted feature ranges; prediction is an extrapolation");
    }
    Ok(Prediction { value, extrapolated })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// `point - oracle` per axis.
    pub delta: Point,
    /// `|delta|` in grid spacings.
    pub cells: Point,
    pub within_one_cell: bool,
    /// `value - oracle value`.
    pub value_gap: f64,
}

impl Discrepancy {
    fn new(point: &Point, value: f64, oracle: &OptimizationResult, bounds: &Bounds, resolution: [usize; 3]) -> Self {
        let spacing = grid_spacing(bounds, resolution);
        let delta: Point = std::array::from_fn(|i| point[i] - oracle.best_point[i]);
        Self {
            delta,
            cells: std::array::from_fn(|i| delta[i].abs() / spacing[i]),
            within_one_cell: within_cells(point, &oracle.best_point, bounds, resolution, 1.0),
            value_gap: value - oracle.best_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: Point,
    pub value: f64,
    pub versus_grid: Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub config_hash: String,
    pub surfaces: Provenance,
    pub scaling: crate::data::TargetRange,
    pub weights: [f64; 5],
    pub normalizers: [f64; 5],
    pub gco: PointReport,
    pub gco_evaluations: usize,
    pub grid: OptimizationResult,
    pub grid_resolution: [usize; 3],
    pub reported: PointReport,
    pub snapped: Option<PointReport>,
    pub multistart: MultiStartSummary,
}

/// Runs GCO and the grid oracle on the composite objective and compares
/// both against the reported optimum.
pub fn cmd_optimize(run: &Run) -> Result<OptimizeReport> {
    let c = &run.config;
    if c.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let gco_config = c.gco;
    gco_config.validate()?;
    let objective = run.objective()?;
    let bounds = *objective.bounds();

    let grid = grid_search(&objective, &bounds, c.grid_resolution, c.grid_budget)?;
    let gco = gco_optimize(&objective, &bounds, &gco_config)?;
    let multistart = multi_start_report(&objective, &bounds, &gco_config, c.restarts)?;

    let point_report = |point: Point| -> Result<PointReport> {
        let value = objective.value(&point)?;
        Ok(PointReport {
            point,
            value,
            versus_grid: Discrepancy::new(&point, value, &grid, &bounds, c.grid_resolution),
        })
    };
    let gco_report = PointReport {
        point: gco.best_point,
        value: gco.best_value,
        versus_grid: Discrepancy::new(&gco.best_point, gco.best_value, &grid, &bounds, c.grid_resolution),
    };
    let reported = point_report(REPORTED_OPTIMUM)?;
    let snapped = if c.snap { Some(point_report(snap_speed(&gco.best_point))?) } else { None };
    if !reported.versus_grid.within_one_cell {
        warn!(
            "reported optimum {:?} is {:?} grid cells from the oracle {:?}",
            REPORTED_OPTIMUM, reported.versus_grid.cells, grid.best_point
        );
    }

    let report = OptimizeReport {
        config_hash: run.hash.clone(),
        surfaces: objective.surfaces().provenance,
        scaling: c.scaling,
        weights: objective.spec().weights,
        normalizers: objective.spec().normalizers,
        gco: gco_report,
        gco_evaluations: gco.evaluations,
        grid,
        grid_resolution: c.grid_resolution,
        reported,
        snapped,
        multistart,
    };

    run.write_config("optimize")?;
    let mut history = run.header();
    history.push_str("iteration,best_value\n");
    for (i, v) in gco.history.iter().enumerate() {
        let _ = writeln!(history, "{},{}", i + 1, v);
    }
    crate::io::write(&run.out("history.csv"), &history)?;
    crate::io::write(&run.out("optimize.json"), &crate::io::to_text(&report))?;
    crate::io::write(&run.out("optimize.txt"), &optimize_summary(run, &report))?;
    Ok(report)
}

pub fn optimize_summary(run: &Run, r: &OptimizeReport) -> String {
    let mut s = run.header();
    let _ = writeln!(s, "# surfaces: {}, scaling: {:?}", r.surfaces, r.scaling);
    let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}{:>14}{:>10}", "source", "s", "f", "d", "COF", "in_cell");
    let mut line = |name: &str, p: &Point, v: f64, cell: Option<bool>| {
        let cell = cell.map_or("-".to_string(), |b| b.to_string());
        let _ = writeln!(s, "{:<10}{:>10.3}{:>10.4}{:>10.4}{:>14.8}{:>10}", name, p[0], p[1], p[2], v, cell);
    };
    line("gco", &r.gco.point, r.gco.value, Some(r.gco.versus_grid.within_one_cell));
    line("grid", &r.grid.best_point, r.grid.best_value, None);
    line("reported", &r.reported.point, r.reported.value, Some(r.reported.versus_grid.within_one_cell));
    if let Some(snapped) = &r.snapped {
        line("snapped", &snapped.point, snapped.value, Some(snapped.versus_grid.within_one_cell));
    }
    let m = &r.multistart;
    let _ = writeln!(
        s,
        "# restarts: {}, best {:.8}, median {:.8}, worst {:.8}",
        m.runs.len(),
        m.best_value,
        m.median_value,
        m.worst_value
    );
    s
}

/// Writes `scatter/<learner>_<response>.txt` (actual, predicted) for the
/// test rows of every model in a completed train run.
pub fn cmd_report(run_dir: &Path) -> Result<Vec<PathBuf>> {
    let doc: ConfigDocument = crate::io::load(&run_dir.join(CONFIG_FILE))?;
    let run = Run::new(RunConfig {
        out: run_dir.to_path_buf(),
        ..doc.config
    })?;
    if run.hash != doc.config_hash {
        return Err(Error::Document {
            path: run_dir.join(CONFIG_FILE),
            reason: format!("dataset or config changed since the run (hash {} != {})", run.hash, doc.config_hash),
        });
    }
    let models_dir = run_dir.join("models");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&models_dir)
        .map_err(|source| Error::Io { path: models_dir.clone(), source })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Document {
            path: models_dir,
            reason: "no model files; run `train` first".into(),
        });
    }
    let (_, test) = run.split()?;
    let points = test.features();
    let mut written = Vec::with_capacity(paths.len());
    for path in paths {
        let file = ModelFile::load(&path)?;
        if file.config_hash != run.hash {
            return Err(Error::Document {
                path,
                reason: format!("model comes from config {}, run config is {}", file.config_hash, run.hash),
            });
        }
        let mut s = run.header();
        let _ = writeln!(s, "# learner: {}, response: {}, split: {}", file.learner, file.response, run.config.split);
        s.push_str("actual,predicted\n");
        for (p, actual) in points.iter().zip(test.targets(file.response)) {
            let _ = writeln!(s, "{},{}", actual, file.model.predict(p));
        }
        let target = run_dir
            .join("scatter")
            .join(format!("{}_{}.txt", file.learner, file.response.name()));
        crate::io::write(&target, &s)?;
        written.push(target);
    }
    Ok(written)
}

/// Random-forest test R² over the configured (n, d) grid.
pub fn cmd_sweep(run: &Run, response: Response) -> Result<SweepResult> {
    let (train, test) = run.split()?;
    let scaling = fit_scaling(&train, run.config.scaling)?;
    let c = &run.config;
    let result = sweep_rf(&train, &test, response, &scaling, &c.sweep_trees, &c.sweep_depths, &c.ensemble_params())?;
    run.write_config("sweep")?;
    let mut csv = run.header();
    csv.push_str("n,d,r2\n");
    for cell in &result.cells {
        let r2 = cell.r2.map_or("undefined".to_string(), |v| v.to_string());
        let _ = writeln!(csv, "{},{},{}", cell.n, cell.d, r2);
    }
    let _ = writeln!(csv, "# best: n={}, d={}, r2={}", result.best.0, result.best.1, result.best_r2);
    crate::io::write(&run.out(format!("sweep_{}.csv", response.name())), &csv)?;
    Ok(result)
}
