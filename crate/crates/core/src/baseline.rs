//! Classical Bayesian optimization over the joint grid, used as the
//! comparison arm.
//!
//! One Gaussian process is fitted on all `N` evaluations per iteration, so
//! its cost grows as `O(N^3)`. Expected improvement is maximized over a
//! pool of random unevaluated tuples plus every one-step grid neighbour of
//! the incumbent, since the discrete joint space is too large to enumerate.
//! This is a clean-room standard BO, not a port of any particular package.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{expected_improvement, AcquisitionParams, ZetaSchedule};
use crate::engine::KernelOverrides;
use crate::error::{Error, Result};
use crate::gp::{gp_fit, GpModel, KernelConfig};
use crate::optimizer::{initial_design, Ledger, Objective, Optimizer, StepReport};
use crate::space::{History, SearchSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct BoConfig {
    pub seed: u64,
    pub zeta: ZetaSchedule,
    pub candidate_pool_size: usize,
    /// Isotropic lengthscale on inputs rescaled to `[0, 1]` per dimension.
    pub lengthscale: f64,
    /// Likelihood noise as a fraction of each fit's signal variance.
    pub noise_fraction: f64,
    pub kernel: KernelOverrides,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            zeta: ZetaSchedule::default(),
            candidate_pool_size: 1000,
            lengthscale: 0.2,
            noise_fraction: KernelConfig::DEFAULT_RELATIVE_NOISE,
            kernel: KernelOverrides::default(),
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidate_pool_size == 0 {
            return Err(Error::config("candidate_pool_size", "must be >= 1"));
        }
        if !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(Error::config("lengthscale", "must be finite and > 0"));
        }
        if !(self.noise_fraction >= 0.0 && self.noise_fraction.is_finite()) {
            return Err(Error::config("noise_fraction", "must be finite and >= 0"));
        }
        self.zeta.validate()
    }
}

pub struct BoOptimizer {
    space: SearchSpace,
    config: BoConfig,
    history: History,
    ledger: Ledger,
    rng: ChaCha8Rng,
    iteration: usize,
    gp_fits: usize,
    gp_failures: usize,
}

impl BoOptimizer {
    pub fn new(space: SearchSpace, config: BoConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            space,
            config,
            history: History::new(),
            ledger: Ledger::default(),
            iteration: 0,
            gp_fits: 0,
            gp_failures: 0,
        })
    }

    pub fn config(&self) -> &BoConfig {
        &self.config
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn gp_fits(&self) -> usize {
        self.gp_fits
    }

    pub fn gp_failures(&self) -> usize {
        self.gp_failures
    }

    pub fn is_evaluated(&self, indices: &[usize]) -> bool {
        self.ledger.contains(indices)
    }

    fn fit(&self) -> Result<GpModel> {
        let records = self.history.records();
        if records.is_empty() {
            return Err(Error::Surrogate("no successful evaluations yet".into()));
        }
        let inputs: Vec<Vec<f64>> = records
            .iter()
            .map(|r| self.space.unit_coordinates(&r.indices))
            .collect();
        let targets: Vec<f64> = records.iter().map(|r| r.value).collect();
        let mut kernel = KernelConfig::for_targets(&targets, self.config.lengthscale);
        kernel.noise_variance = kernel.signal_variance * self.config.noise_fraction;
        let kernel = self.config.kernel.apply(kernel);
        gp_fit(&inputs, &targets, &kernel)
    }

    /// Random unevaluated tuples followed by the incumbent's unevaluated
    /// one-step neighbours, without duplicates.
    fn candidate_pool(&mut self) -> Vec<Vec<usize>> {
        let mut taken = HashSet::new();
        let mut pool = Vec::with_capacity(self.config.candidate_pool_size + 2 * self.space.dims());
        for _ in 0..self.config.candidate_pool_size {
            match self
                .ledger
                .random_unevaluated(&self.space, &taken, &mut self.rng)
            {
                Some(c) => {
                    taken.insert(c.clone());
                    pool.push(c);
                }
                None => break,
            }
        }
        if let Some(best) = self.history.best() {
            let incumbent = best.indices.clone();
            for d in 0..self.space.dims() {
                let len = self.space.grid(d).len();
                for delta in [-1isize, 1] {
                    let i = incumbent[d] as isize + delta;
                    if i < 0 || i as usize >= len {
                        continue;
                    }
                    let mut n = incumbent.clone();
                    n[d] = i as usize;
                    if !self.ledger.contains(&n) && taken.insert(n.clone()) {
                        pool.push(n);
                    }
                }
            }
        }
        pool
    }
}

impl Optimizer for BoOptimizer {
    fn name(&self) -> &'static str {
        "bo"
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
        let (_, suggested) =
            self.ledger
                .evaluate_batch(&self.space, &mut self.history, objective, &design);
        StepReport {
            evaluations: design.len(),
            best_value: self.history.best_value(),
            gp_fits: 0,
            gp_fit_time: Duration::ZERO,
            suggested,
        }
    }

    /// Fits the joint surrogate on every record, maximizes EI over the
    /// candidate pool and evaluates the winner. A failed fit degrades to a
    /// uniformly random suggestion.
    fn step(&mut self, objective: &dyn Objective, budget: usize) -> Option<StepReport> {
        if budget == 0 {
            return None;
        }
        let fit_start = Instant::now();
        let model = self.fit();
        let gp_fit_time = fit_start.elapsed();

        let pool = self.candidate_pool();
        if pool.is_empty() {
            return None;
        }
        let choice = match &model {
            Ok(model) => {
                let inputs: Vec<Vec<f64>> = pool
                    .iter()
                    .map(|c| self.space.unit_coordinates(c))
                    .collect();
                let best = model.standardize(self.history.best_value().unwrap());
                let params = AcquisitionParams {
                    best_value: best,
                    zeta: self.config.zeta.at(self.iteration),
                };
                let mut winner = 0;
                let mut winner_ei = f64::NEG_INFINITY;
                for (i, stats) in model.predict_standardized(&inputs).into_iter().enumerate() {
                    let ei = expected_improvement(stats, params);
                    if ei > winner_ei {
                        winner = i;
                        winner_ei = ei;
                    }
                }
                winner
            }
            Err(err) => {
                log::warn!("baseline surrogate failed: {err}; suggesting a random tuple");
                self.gp_failures += 1;
                0
            }
        };
        self.gp_fits += 1;
        let batch = [pool[choice].clone()];
        let (_, suggested) =
            self.ledger
                .evaluate_batch(&self.space, &mut self.history, objective, &batch);
        self.iteration += 1;
        Some(StepReport {
            evaluations: 1,
            best_value: self.history.best_value(),
            gp_fits: 1,
            gp_fit_time,
            suggested,
        })
    }
}
