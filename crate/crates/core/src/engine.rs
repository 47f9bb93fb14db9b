//! The SCORE optimizer.
//!
//! Instead of one surrogate over the joint space, every dimension gets its
//! own 1D Gaussian process fitted to a *min-projection* of the history: for
//! each grid value of that parameter, the best objective value observed
//! among all evaluations that used it. Expected improvement over the full
//! grid of each dimension gives a score per parameter value, and candidate
//! combinations are assembled from those per-dimension scores.
//!
//! Per-iteration cost depends on the number of dimensions and the grid
//! lengths, never on the number of evaluations, since each 1D fit sees at
//! most one point per grid value.
//!
//! Batch assembly: the first candidate takes the argmax of every
//! dimension's scores; the rest of the batch samples each dimension
//! independently from a softmax over its scores with temperature
//! `temperature * (max - min)`. Duplicates are redrawn and, past a retry
//! limit, replaced by uniformly random unevaluated tuples.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{score_grid, AcquisitionParams, ZetaSchedule};
use crate::error::{Error, Result};
use crate::gp::{gp_fit, KernelConfig};
use crate::optimizer::{initial_design, Ledger, Objective, Optimizer, StepReport};
use crate::space::{EvaluationRecord, History, SearchSpace};

/// Best value and visit count for one grid value of one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionEntry {
    pub best_value: f64,
    pub count: usize,
}

/// Per-dimension min-projection of the evaluation history.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTable {
    dims: Vec<Vec<Option<ProjectionEntry>>>,
}

impl ProjectionTable {
    pub fn new(space: &SearchSpace) -> Self {
        Self {
            dims: space.grids().iter().map(|g| vec![None; g.len()]).collect(),
        }
    }

    pub fn from_records(space: &SearchSpace, records: &[EvaluationRecord]) -> Self {
        let mut table = Self::new(space);
        for r in records {
            table.update(r);
        }
        table
    }

    pub fn update(&mut self, record: &EvaluationRecord) {
        for (column, &i) in self.dims.iter_mut().zip(&record.indices) {
            let slot = &mut column[i];
            *slot = Some(match *slot {
                None => ProjectionEntry {
                    best_value: record.value,
                    count: 1,
                },
                Some(e) => ProjectionEntry {
                    best_value: e.best_value.min(record.value),
                    count: e.count + 1,
                },
            });
        }
    }

    pub fn dims(&self) -> usize {
        self.dims.len()
    }

    pub fn entry(&self, d: usize, index: usize) -> Option<ProjectionEntry> {
        self.dims[d][index]
    }

    /// `(grid index, entry)` for every observed value of dimension `d`.
    pub fn observed(&self, d: usize) -> impl Iterator<Item = (usize, ProjectionEntry)> + '_ {
        self.dims[d]
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|e| (i, e)))
    }
}

/// Optional overrides of the default per-dimension kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelOverrides {
    pub lengthscale: Option<f64>,
    pub signal_variance: Option<f64>,
    pub noise_variance: Option<f64>,
    pub jitter: Option<f64>,
}

impl KernelOverrides {
    pub(crate) fn apply(&self, mut kernel: KernelConfig) -> KernelConfig {
        if let Some(v) = self.lengthscale {
            kernel.lengthscale = v;
        }
        if let Some(v) = self.signal_variance {
            kernel.signal_variance = v;
        }
        if let Some(v) = self.noise_variance {
            kernel.noise_variance = v;
        }
        if let Some(v) = self.jitter {
            kernel.jitter = v;
        }
        kernel
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    pub batch_size: usize,
    pub seed: u64,
    pub zeta: ZetaSchedule,
    /// Kernel lengthscale in grid steps; the 1D surrogates are fit on grid
    /// index coordinates.
    pub lengthscale_steps: f64,
    /// Likelihood noise as a fraction of each fit's signal variance.
    pub noise_fraction: f64,
    pub kernel: KernelOverrides,
    /// Softmax temperature as a fraction of each dimension's score range.
    pub temperature: f64,
    /// Score dimensions on the rayon pool.
    pub parallel: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            batch_size: 1,
            seed: 0,
            zeta: ZetaSchedule::default(),
            lengthscale_steps: 1.0,
            noise_fraction: KernelConfig::DEFAULT_RELATIVE_NOISE,
            kernel: KernelOverrides::default(),
            temperature: 0.1,
            parallel: false,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be >= 1"));
        }
        if !(self.lengthscale_steps > 0.0 && self.lengthscale_steps.is_finite()) {
            return Err(Error::config("lengthscale_steps", "must be finite and > 0"));
        }
        if !(self.noise_fraction >= 0.0 && self.noise_fraction.is_finite()) {
            return Err(Error::config("noise_fraction", "must be finite and >= 0"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::config("temperature", "must be finite and > 0"));
        }
        self.zeta.validate()
    }
}

const TEMPERATURE_FLOOR: f64 = 1e-9;

pub struct ScoreOptimizer {
    space: SearchSpace,
    config: ScoreConfig,
    history: History,
    projections: ProjectionTable,
    ledger: Ledger,
    rng: ChaCha8Rng,
    iteration: usize,
    gp_fits: usize,
    gp_fallbacks: usize,
}

impl ScoreOptimizer {
    pub fn new(space: SearchSpace, config: ScoreConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            projections: ProjectionTable::new(&space),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            space,
            config,
            history: History::new(),
            ledger: Ledger::default(),
            iteration: 0,
            gp_fits: 0,
            gp_fallbacks: 0,
        })
    }

    pub fn config(&self) -> &ScoreConfig {
        &self.config
    }

    pub fn projections(&self) -> &ProjectionTable {
        &self.projections
    }

    /// Number of completed optimizer iterations (initial design excluded).
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Total 1D surrogate fits so far.
    pub fn gp_fits(&self) -> usize {
        self.gp_fits
    }

    /// Fits that failed and fell back to uniform scores.
    pub fn gp_fallbacks(&self) -> usize {
        self.gp_fallbacks
    }

    pub fn is_evaluated(&self, indices: &[usize]) -> bool {
        self.ledger.contains(indices)
    }

    /// Folds records (already in the history) into the projection table.
    pub fn update_projections(&mut self, record_ids: &[usize]) {
        for &id in record_ids {
            self.projections.update(&self.history.records()[id]);
        }
    }

    /// Evaluates a caller-chosen batch, e.g. a hand-picked initial design.
    /// Tuples that are invalid or already evaluated are skipped.
    pub fn evaluate(&mut self, objective: &dyn Objective, candidates: &[Vec<usize>]) -> usize {
        let mut seen = HashSet::new();
        let fresh: Vec<Vec<usize>> = candidates
            .iter()
            .filter(|c| {
                self.space.check_indices(c).is_ok()
                    && !self.ledger.contains(c)
                    && seen.insert(c.to_vec())
            })
            .cloned()
            .collect();
        let (added, _) =
            self.ledger
                .evaluate_batch(&self.space, &mut self.history, objective, &fresh);
        self.update_projections(&added);
        fresh.len()
    }

    /// Expected-improvement score of every grid value of dimension `d`.
    ///
    /// Falls back to uniform scores if dimension `d` has no observations
    /// or its surrogate cannot be fitted.
    pub fn score_dimension(&self, d: usize) -> Vec<f64> {
        let len = self.space.grid(d).len();
        match self.try_score_dimension(d) {
            Ok(scores) => scores,
            Err(err) => {
                log::warn!("dimension {d}: {err}; using uniform scores");
                vec![1.0; len]
            }
        }
    }

    fn try_score_dimension(&self, d: usize) -> Result<Vec<f64>> {
        let best = self
            .history
            .best_value()
            .ok_or_else(|| Error::Surrogate("no successful evaluations yet".into()))?;
        let (inputs, targets): (Vec<Vec<f64>>, Vec<f64>) = self
            .projections
            .observed(d)
            .map(|(i, e)| (vec![i as f64], e.best_value))
            .unzip();
        if inputs.is_empty() {
            return Err(Error::Surrogate("no observed values".into()));
        }
        let mut kernel = KernelConfig::for_targets(&targets, self.config.lengthscale_steps);
        kernel.noise_variance = kernel.signal_variance * self.config.noise_fraction;
        let kernel = self.config.kernel.apply(kernel);
        let model = gp_fit(&inputs, &targets, &kernel)?;
        let grid: Vec<Vec<f64>> = (0..self.space.grid(d).len())
            .map(|i| vec![i as f64])
            .collect();
        let posteriors = model.predict_standardized(&grid);
        let params =
            AcquisitionParams::new(model.standardize(best), self.config.zeta.at(self.iteration))?;
        Ok(score_grid(&posteriors, params))
    }

    fn score_all(&self) -> (Vec<Vec<f64>>, usize) {
        let dims = self.space.dims();
        let results: Vec<Result<Vec<f64>>> = if self.config.parallel {
            (0..dims)
                .into_par_iter()
                .map(|d| self.try_score_dimension(d))
                .collect()
        } else {
            (0..dims).map(|d| self.try_score_dimension(d)).collect()
        };
        let mut fallbacks = 0;
        let scores = results
            .into_iter()
            .enumerate()
            .map(|(d, r)| {
                r.unwrap_or_else(|err| {
                    log::warn!("dimension {d}: {err}; using uniform scores");
                    fallbacks += 1;
                    vec![1.0; self.space.grid(d).len()]
                })
            })
            .collect();
        (scores, fallbacks)
    }

    /// Assembles up to `batch_size` distinct, never-evaluated candidates
    /// from per-dimension scores. An empty result means the space is
    /// exhausted.
    pub fn select_batch(&mut self, per_dim_scores: &[Vec<f64>]) -> Vec<Vec<usize>> {
        self.select_batch_sized(per_dim_scores, self.config.batch_size)
    }

    fn select_batch_sized(&mut self, per_dim_scores: &[Vec<f64>], size: usize) -> Vec<Vec<usize>> {
        assert_eq!(per_dim_scores.len(), self.space.dims());
        let size = match self.ledger.remaining(&self.space) {
            Some(r) => size.min(r),
            None => size,
        };
        if size == 0 {
            return Vec::new();
        }

        let mut batch: Vec<Vec<usize>> = Vec::with_capacity(size);
        let mut taken: HashSet<Vec<usize>> = HashSet::new();

        let greedy: Vec<usize> = per_dim_scores.iter().map(|s| argmax(s)).collect();
        if !self.ledger.contains(&greedy) {
            taken.insert(greedy.clone());
            batch.push(greedy);
        }

        let samplers: Vec<SoftmaxSampler> = per_dim_scores
            .iter()
            .map(|s| SoftmaxSampler::new(s, self.config.temperature))
            .collect();
        let mut attempts = 0;
        let max_attempts = 100 * size;
        while batch.len() < size && attempts < max_attempts {
            attempts += 1;
            let c: Vec<usize> = samplers.iter().map(|s| s.sample(&mut self.rng)).collect();
            if !self.ledger.contains(&c) && taken.insert(c.clone()) {
                batch.push(c);
            }
        }
        while batch.len() < size {
            match self
                .ledger
                .random_unevaluated(&self.space, &taken, &mut self.rng)
            {
                Some(c) => {
                    taken.insert(c.clone());
                    batch.push(c);
                }
                None => break,
            }
        }
        batch
    }
}

impl Optimizer for ScoreOptimizer {
    fn name(&self) -> &'static str {
        "score"
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn history(&self) -> &History {
        &self.history
    }

    fn evaluations(&self) -> usize {
        self.ledger.len()
    }

    fn dropped(&self) -> usize {
        self.ledger.dropped
    }

    fn initialize(&mut self, objective: &dyn Objective, n_init: usize) -> StepReport {
        let design = initial_design(&self.space, &self.ledger, n_init, &mut self.rng);
        let (added, suggested) =
            self.ledger
                .evaluate_batch(&self.space, &mut self.history, objective, &design);
        self.update_projections(&added);
        StepReport {
            evaluations: design.len(),
            best_value: self.history.best_value(),
            gp_fits: 0,
            gp_fit_time: Duration::ZERO,
            suggested,
        }
    }

    /// One SCORE iteration: one surrogate fit per dimension, one batch,
    /// `batch_size` objective calls (fewer if the budget or the space runs
    /// out).
    fn step(&mut self, objective: &dyn Objective, budget: usize) -> Option<StepReport> {
        let size = self.config.batch_size.min(budget);
        if size == 0 {
            return None;
        }
        let fit_start = Instant::now();
        let (scores, fallbacks) = self.score_all();
        let gp_fit_time = fit_start.elapsed();
        let batch = self.select_batch_sized(&scores, size);
        if batch.is_empty() {
            return None;
        }
        let dims = self.space.dims();
        self.gp_fits += dims;
        self.gp_fallbacks += fallbacks;

        let (added, suggested) =
            self.ledger
                .evaluate_batch(&self.space, &mut self.history, objective, &batch);
        self.update_projections(&added);
        self.iteration += 1;
        Some(StepReport {
            evaluations: batch.len(),
            best_value: self.history.best_value(),
            gp_fits: dims,
            gp_fit_time,
            suggested,
        })
    }
}

/// Index of the largest finite score; lowest index on ties.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

struct SoftmaxSampler {
    cumulative: Vec<f64>,
}

impl SoftmaxSampler {
    fn new(scores: &[f64], relative_temperature: f64) -> Self {
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let tau = (relative_temperature * (max - min)).max(TEMPERATURE_FLOOR);
        let mut acc = 0.0;
        let cumulative = scores
            .iter()
            .map(|s| {
                acc += ((s - max) / tau).exp();
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::GridScale;

    fn space(dims: usize, count: usize) -> SearchSpace {
        SearchSpace::uniform(dims, 0.0, 1.0, count, GridScale::Linear).unwrap()
    }

    fn record(indices: Vec<usize>, value: f64) -> EvaluationRecord {
        EvaluationRecord {
            point: vec![0.0; indices.len()],
            indices,
            value,
            eval_id: 0,
            wall_time: Duration::ZERO,
        }
    }

    #[test]
    fn projection_keeps_the_minimum_per_value() {
        let s = space(2, 5);
        let mut t = ProjectionTable::new(&s);
        t.update(&record(vec![1, 2], 5.0));
        assert_eq!(
            t.entry(0, 1),
            Some(ProjectionEntry {
                best_value: 5.0,
                count: 1
            })
        );
        assert_eq!(
            t.entry(1, 2),
            Some(ProjectionEntry {
                best_value: 5.0,
                count: 1
            })
        );
        t.update(&record(vec![1, 3], 4.0));
        assert_eq!(
            t.entry(0, 1),
            Some(ProjectionEntry {
                best_value: 4.0,
                count: 2
            })
        );
        assert_eq!(
            t.entry(1, 3),
            Some(ProjectionEntry {
                best_value: 4.0,
                count: 1
            })
        );
        assert_eq!(t.entry(1, 2).unwrap().best_value, 5.0);
        assert_eq!(t.entry(0, 0), None);
    }

    #[test]
    fn greedy_candidate_is_the_per_dimension_argmax() {
        let mut opt = ScoreOptimizer::new(space(2, 2), ScoreConfig::default()).unwrap();
        let batch = opt.select_batch(&[vec![0.1, 0.9], vec![0.3, 0.2]]);
        assert_eq!(batch, vec![vec![1, 0]]);
    }

    #[test]
    fn evaluated_argmax_is_replaced() {
        let mut opt = ScoreOptimizer::new(space(2, 2), ScoreConfig::default()).unwrap();
        opt.evaluate(&|x: &[f64]| x[0] + x[1], &[vec![1, 0]]);
        let batch = opt.select_batch(&[vec![0.1, 0.9], vec![0.3, 0.2]]);
        assert_eq!(batch.len(), 1);
        assert_ne!(batch[0], vec![1, 0]);
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        assert_eq!(argmax(&[0.5, 0.5, 0.1]), 0);
        assert_eq!(argmax(&[0.0, 0.0]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }

    #[test]
    fn batch_is_truncated_at_exhaustion() {
        let config = ScoreConfig {
            batch_size: 10,
            ..Default::default()
        };
        let mut opt = ScoreOptimizer::new(space(2, 2), config).unwrap();
        let f = |x: &[f64]| x[0] - x[1];
        opt.initialize(&f, 1);
        let report = opt.step(&f, 100).unwrap();
        assert_eq!(report.evaluations, 3);
        assert!(opt.step(&f, 100).is_none());
        assert_eq!(opt.evaluations(), 4);
    }

    #[test]
    fn softmax_with_flat_scores_is_uniform_and_peaked_scores_are_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let flat = SoftmaxSampler::new(&[0.2; 4], 0.1);
        let mut seen = [0usize; 4];
        for _ in 0..4000 {
            seen[flat.sample(&mut rng)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800), "{seen:?}");
        let peaked = SoftmaxSampler::new(&[0.0, 1.0, 0.0], 0.01);
        assert!((0..100).all(|_| peaked.sample(&mut rng) == 1));
    }

    #[test]
    fn failed_surrogate_falls_back_to_uniform_scores() {
        let opt = ScoreOptimizer::new(space(2, 4), ScoreConfig::default()).unwrap();
        assert_eq!(opt.score_dimension(0), vec![1.0; 4]);
    }

    #[test]
    fn config_validation() {
        let bad = ScoreConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(ScoreOptimizer::new(space(1, 3), bad).is_err());
        let bad = ScoreConfig {
            temperature: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
