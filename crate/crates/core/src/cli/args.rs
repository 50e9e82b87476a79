use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_five, parse_point, LearnerSelection, Normalizers, RunConfig};
use super::{cmd_optimize, cmd_predict, cmd_report, cmd_sweep, cmd_train, metrics_table, optimize_summary, PredictSource, Run};
use crate::data::{Point, Response, SplitName, TargetRange};
use crate::error::Result;
use crate::objective::Provenance;

#[derive(Debug, Parser)]
#[command(name = "hardturn", version, about = "Surrogate models and GCO for hard-turning parameters")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all subcommands; each overrides the matching config field.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Run config file (JSON); flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Dataset file; defaults to the bundled table.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    #[arg(long, global = true)]
    pub split: Option<SplitName>,
    #[arg(long, global = true)]
    pub scaling: Option<TargetRange>,
    /// Reject the dataset on any detected anomaly.
    #[arg(long, global = true)]
    pub strict: bool,
    /// pr, rf, gb, ab or all.
    #[arg(long, global = true)]
    pub learner: Option<LearnerSelection>,
    /// Number of trees.
    #[arg(long = "n", global = true)]
    pub n_trees: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub min_leaf: Option<usize>,
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    /// Seeds the learners and the optimizer.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Five comma-separated COF weights (Ra, F, CW_L, CW_W, FW).
    #[arg(long, global = true, value_parser = parse_five)]
    pub weights: Option<[f64; 5]>,
    /// `max` or `custom:a,b,c,d,e`.
    #[arg(long, global = true)]
    pub normalizers: Option<Normalizers>,
    /// printed or refit.
    #[arg(long, global = true)]
    pub surfaces: Option<Provenance>,
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    #[arg(long, global = true)]
    pub population: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Snap the GCO speed to the nearest tested level in the report.
    #[arg(long, global = true)]
    pub snap: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => crate::io::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set! {
            split => c.split,
            scaling => c.scaling,
            learner => c.learner,
            n_trees => c.n_trees,
            depth => c.max_depth,
            min_leaf => c.min_leaf,
            learning_rate => c.learning_rate,
            weights => c.weights,
            normalizers => c.normalizers,
            surfaces => c.surfaces,
            iterations => c.gco.max_iterations,
            population => c.gco.population_size,
            restarts => c.restarts,
            out => c.out,
        }
        if let Some(d) = &self.data {
            c.data = Some(d.clone());
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
            c.gco.seed = seed;
        }
        c.strict |= self.strict;
        c.snap |= self.snap;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit learners for all five responses and write test metrics.
    Train,
    /// Predict one response at a point from a saved model or a surface.
    Predict {
        #[arg(long, conflicts_with = "surface", required_unless_present = "surface")]
        model: Option<PathBuf>,
        /// Response surface from the configured set (see --surfaces).
        #[arg(long)]
        surface: Option<Response>,
        /// s,f,d
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Point,
    },
    /// Minimize the composite objective with GCO and the grid oracle.
    Optimize,
    /// Write actual-vs-predicted files for a completed train run.
    Report {
        /// Run directory; defaults to --out.
        #[arg(long)]
        run: Option<PathBuf>,
    },
    /// Random-forest (n, d) grid.
    Sweep {
        #[arg(long, default_value = "F")]
        response: Response,
        #[arg(long, value_delimiter = ',')]
        trees: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
    },
}

/// Executes a parsed command line, printing summaries to stdout.
pub fn run(cli: Cli) -> Result<()> {
    let mut config = cli.overrides.resolve()?;
    match cli.command {
        Command::Train => {
            let run = Run::new(config)?;
            let reports = cmd_train(&run)?;
            print!("{}", metrics_table(&run, &reports));
        }
        Command::Predict { model, surface, point } => {
            let run = Run::new(config)?;
            let source = match (model, surface) {
                (Some(path), _) => PredictSource::Model(path),
                (None, Some(r)) => PredictSource::Surface(r),
                (None, None) => unreachable!("clap requires one of --model/--surface"),
            };
            let p = cmd_predict(&run, &source, &point)?;
            println!("{}", p.value);
        }
        Command::Optimize => {
            let run = Run::new(config)?;
            let report = cmd_optimize(&run)?;
            print!("{}", optimize_summary(&run, &report));
        }
        Command::Report { run } => {
            let dir = run.unwrap_or(config.out);
            for path in cmd_report(&dir)? {
                println!("{}", path.display());
            }
        }
        Command::Sweep { response, trees, depths } => {
            if let Some(t) = trees {
                config.sweep_trees = t;
            }
            if let Some(d) = depths {
                config.sweep_depths = d;
            }
            let run = Run::new(config)?;
            let r = cmd_sweep(&run, response)?;
            println!("best n={} d={} r2={}", r.best.0, r.best.1, r.best_r2);
        }
    }
    Ok(())
}
