//! Germinal Center Optimization over an axis-aligned box.
//!
//! Each B cell carries a position and a life signal. Per generation:
//!
//! * dark zone: `population_size` targets are drawn by roulette over the
//!   life signals. Each target is cloned and hyper-mutated with a DE/rand/1
//!   donor `x_a + F (x_b - x_c)` and binomial crossover, then clamped into
//!   the box. The trial replaces the cell it was cloned from when it is no
//!   worse.
//! * light zone: cells that strictly improved gain `life_reward`, all
//!   others receive `life_penalty`; signals are clamped to
//!   `[life_min, life_max]`.
//!
//! Trials are generated from the population snapshot and applied in draw
//! order, so results depend only on the seed.

mod grid;
mod multistart;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Point, SPEED_LEVELS};
use crate::error::{Error, Result};
use crate::learners::rng::stream;
use crate::objective::Bounds;

pub use grid::{grid_axis, grid_search, grid_spacing, within_cells, DEFAULT_BUDGET};
pub use multistart::{multi_start_report, MultiStartSummary, RestartOutcome};

pub trait Objective {
    fn evaluate(&self, point: &Point) -> f64;
}

impl<F: Fn(&Point) -> f64> Objective for F {
    fn evaluate(&self, point: &Point) -> f64 {
        self(point)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BCell {
    pub position: Point,
    pub life_signal: f64,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcoConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Differential weight F.
    pub mutation_factor: f64,
    pub crossover_rate: f64,
    pub life_init: f64,
    pub life_reward: f64,
    /// Signed additive change for cells that did not improve.
    pub life_penalty: f64,
    pub life_min: f64,
    pub life_max: f64,
    pub seed: u64,
}

impl Default for GcoConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            max_iterations: 500,
            mutation_factor: 0.7,
            crossover_rate: 0.9,
            life_init: 1.0,
            life_reward: 0.1,
            life_penalty: -0.1,
            life_min: 0.1,
            life_max: 3.0,
            seed: 0,
        }
    }
}

impl GcoConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if self.population_size < 4 {
            return fail(format!("population_size {} < 4", self.population_size));
        }
        if self.max_iterations < 1 {
            return fail("max_iterations must be at least 1".into());
        }
        if !(self.crossover_rate > 0.0 && self.crossover_rate <= 1.0) {
            return fail(format!("crossover_rate {} outside (0, 1]", self.crossover_rate));
        }
        if !(self.mutation_factor.is_finite() && self.mutation_factor > 0.0) {
            return fail(format!("mutation_factor {} must be positive", self.mutation_factor));
        }
        if !(self.life_min > 0.0 && self.life_min <= self.life_max) {
            return fail(format!(
                "life signal range [{}, {}] must be positive and ordered",
                self.life_min, self.life_max
            ));
        }
        if !(self.life_init >= self.life_min && self.life_init <= self.life_max) {
            return fail(format!("life_init {} outside the life signal range", self.life_init));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_point: Point,
    pub best_value: f64,
    /// Best value after each iteration (non-increasing).
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Roulette draw: index `i` with probability `life[i] / sum(life)`.
pub fn select_by_life<R: Rng>(life: &[f64], rng: &mut R) -> usize {
    let total: f64 = life.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, l) in life.iter().enumerate() {
        acc += l;
        if u < acc {
            return i;
        }
    }
    life.len() - 1
}

fn distinct_donors<R: Rng>(n: usize, target: usize, rng: &mut R) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let c = rng.gen_range(0..n);
        if c != target && !picked[..k].contains(&c) {
            picked[k] = c;
            k += 1;
        }
    }
    picked
}

pub fn gco_optimize<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &GcoConfig,
) -> Result<OptimizationResult> {
    Ok(run(objective, bounds, config)?.0)
}

/// Full run, also returning the final population.
pub fn run<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &GcoConfig,
) -> Result<(OptimizationResult, Vec<BCell>)> {
    config.validate()?;
    Bounds::new(bounds.lower, bounds.upper)?;
    let mut rng = stream(config.seed, 0);
    let n = config.population_size;

    let mut cells: Vec<BCell> = (0..n)
        .map(|_| {
            let mut position = [0.0; 3];
            for (axis, v) in position.iter_mut().enumerate() {
                *v = bounds.lower[axis] + rng.gen::<f64>() * bounds.width(axis);
            }
            let position = bounds.clamp(&position);
            BCell {
                position,
                life_signal: config.life_init,
                fitness: objective.evaluate(&position),
            }
        })
        .collect();
    let mut evaluations = n;

    let mut best = cells[0];
    for c in &cells[1..] {
        if c.fitness < best.fitness {
            best = *c;
        }
    }

    let mut history = Vec::with_capacity(config.max_iterations);
    for _ in 0..config.max_iterations {
        // dark zone
        let life: Vec<f64> = cells.iter().map(|c| c.life_signal).collect();
        let mut trials = Vec::with_capacity(n);
        for _ in 0..n {
            let target = select_by_life(&life, &mut rng);
            let [a, b, c] = distinct_donors(n, target, &mut rng);
            let forced = rng.gen_range(0..3);
            let mut trial = cells[target].position;
            for (axis, v) in trial.iter_mut().enumerate() {
                if axis == forced || rng.gen::<f64>() < config.crossover_rate {
                    *v = cells[a].position[axis]
                        + config.mutation_factor
                            * (cells[b].position[axis] - cells[c].position[axis]);
                }
            }
            trials.push((target, bounds.clamp(&trial)));
        }
        let values: Vec<f64> = trials.iter().map(|(_, p)| objective.evaluate(p)).collect();
        evaluations += n;

        let mut improved = vec![false; n];
        for ((target, position), value) in trials.into_iter().zip(values) {
            let cell = &mut cells[target];
            if value <= cell.fitness {
                improved[target] |= value < cell.fitness;
                cell.position = position;
                cell.fitness = value;
            }
            if value < best.fitness {
                best = *cell;
            }
        }

        // light zone
        for (cell, up) in cells.iter_mut().zip(&improved) {
            let delta = if *up { config.life_reward } else { config.life_penalty };
            cell.life_signal = (cell.life_signal + delta).clamp(config.life_min, config.life_max);
        }
        history.push(best.fitness);
    }

    let result = OptimizationResult {
        best_point: best.position,
        best_value: best.fitness,
        history,
        evaluations,
    };
    Ok((result, cells))
}

/// Moves the speed coordinate to the nearest experimental level.
pub fn snap_speed(point: &Point) -> Point {
    let s = SPEED_LEVELS
        .iter()
        .copied()
        .min_by(|a, b| (a - point[0]).abs().total_cmp(&(b - point[0]).abs()))
        .expect("levels are non-empty");
    [s, point[1], point[2]]
}
