//! Pieces shared by the SCORE engine and the baseline: the objective
//! contract, per-step reports and batch evaluation bookkeeping.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::space::{History, SearchSpace};

/// A black-box function to minimize. A non-finite return value marks a
/// failed evaluation; the point is then dropped but never re-suggested.
pub trait Objective {
    fn evaluate(&self, point: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, point: &[f64]) -> f64 {
        self(point)
    }
}

/// What happened during one optimizer iteration (or the initial design).
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Objective calls made in this step, failed ones included.
    pub evaluations: usize,
    /// Incumbent after the step; `None` while every evaluation has failed.
    pub best_value: Option<f64>,
    /// Surrogate fits performed in this step.
    pub gp_fits: usize,
    pub gp_fit_time: Duration,
    /// Indices of the best candidate evaluated in this step.
    pub suggested: Vec<usize>,
}

/// Common driver interface used by the benchmark runner.
pub trait Optimizer {
    fn name(&self) -> &'static str;
    fn space(&self) -> &SearchSpace;
    fn history(&self) -> &History;
    /// Objective calls so far, failed ones included.
    fn evaluations(&self) -> usize;
    /// Evaluations that returned a non-finite value.
    fn dropped(&self) -> usize;
    fn initialize(&mut self, objective: &dyn Objective, n_init: usize) -> StepReport;
    /// One iteration spending at most `budget` evaluations. `None` once the
    /// search space is exhausted or the budget is zero.
    fn step(&mut self, objective: &dyn Objective, budget: usize) -> Option<StepReport>;
}

/// Evaluated index tuples plus the number of dropped (non-finite) results.
#[derive(Debug, Clone, Default)]
pub(crate) struct Ledger {
    pub evaluated: HashSet<Vec<usize>>,
    pub dropped: usize,
}

impl Ledger {
    pub fn contains(&self, indices: &[usize]) -> bool {
        self.evaluated.contains(indices)
    }

    pub fn len(&self) -> usize {
        self.evaluated.len()
    }

    /// Combinations never evaluated, or `None` when the space is too large
    /// to count exactly.
    pub fn remaining(&self, space: &SearchSpace) -> Option<usize> {
        let total = space.total_combinations();
        (total <= 9.0e15).then(|| total as usize - self.len())
    }

    /// Evaluates each candidate, records successes into `history` and
    /// returns the ids of the new records along with the batch's best tuple.
    pub fn evaluate_batch(
        &mut self,
        space: &SearchSpace,
        history: &mut History,
        objective: &dyn Objective,
        candidates: &[Vec<usize>],
    ) -> (Vec<usize>, Vec<usize>) {
        let mut added = Vec::with_capacity(candidates.len());
        let mut batch_best: Option<(f64, &Vec<usize>)> = None;
        for indices in candidates {
            let point = space.point(indices);
            let start = Instant::now();
            let value = objective.evaluate(&point);
            let elapsed = start.elapsed();
            self.evaluated.insert(indices.clone());
            match history.record_evaluation(space, indices, value, elapsed) {
                Ok(rec) => {
                    added.push(rec.eval_id);
                    if batch_best.is_none_or(|(b, _)| value < b) {
                        batch_best = Some((value, indices));
                    }
                }
                Err(err @ Error::NonFiniteValue { .. }) => {
                    self.dropped += 1;
                    log::warn!("dropping evaluation: {err}");
                }
                Err(err) => panic!("optimizer produced invalid candidate: {err}"),
            }
        }
        let suggested = batch_best
            .map(|(_, i)| i.clone())
            .or_else(|| candidates.first().cloned())
            .unwrap_or_default();
        (added, suggested)
    }

    /// A uniformly random tuple that has not been evaluated and is not in
    /// `taken`. `None` if no such tuple exists.
    pub fn random_unevaluated(
        &self,
        space: &SearchSpace,
        taken: &HashSet<Vec<usize>>,
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<usize>> {
        let blocked = |c: &Vec<usize>| self.contains(c) || taken.contains(c);
        let total = space.total_combinations();
        let occupied = (self.len() + taken.len()) as f64;
        if occupied >= total {
            return None;
        }
        // Rejection sampling is cheap while most of the space is free.
        if occupied < 0.5 * total {
            loop {
                let c = random_tuple(space, rng);
                if !blocked(&c) {
                    return Some(c);
                }
            }
        }
        let free: Vec<Vec<usize>> = all_tuples(space).filter(|c| !blocked(c)).collect();
        if free.is_empty() {
            None
        } else {
            Some(free[rng.random_range(0..free.len())].clone())
        }
    }
}

pub(crate) fn random_tuple(space: &SearchSpace, rng: &mut ChaCha8Rng) -> Vec<usize> {
    space
        .grids()
        .iter()
        .map(|g| rng.random_range(0..g.len()))
        .collect()
}

/// Every index tuple in lexicographic order. Only sensible for small spaces.
pub(crate) fn all_tuples(space: &SearchSpace) -> impl Iterator<Item = Vec<usize>> + '_ {
    let lens: Vec<usize> = space.grids().iter().map(|g| g.len()).collect();
    let mut next = Some(vec![0usize; lens.len()]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for d in (0..lens.len()).rev() {
            succ[d] += 1;
            if succ[d] < lens[d] {
                next = Some(succ);
                break;
            }
            succ[d] = 0;
        }
        Some(current)
    })
}

/// Draws `n` distinct random tuples (fewer if the space is smaller).
pub(crate) fn initial_design(
    space: &SearchSpace,
    ledger: &Ledger,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut taken = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        match ledger.random_unevaluated(space, &taken, rng) {
            Some(c) => {
                taken.insert(c.clone());
                out.push(c);
            }
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::GridScale;
    use rand::SeedableRng;

    #[test]
    fn all_tuples_enumerates_the_product() {
        let space = SearchSpace::uniform(3, 0.0, 1.0, 3, GridScale::Linear).unwrap();
        let all: Vec<_> = all_tuples(&space).collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all[0], vec![0, 0, 0]);
        assert_eq!(all[1], vec![0, 0, 1]);
        assert_eq!(all[26], vec![2, 2, 2]);
        let unique: HashSet<_> = all.into_iter().collect();
        assert_eq!(unique.len(), 27);
    }

    #[test]
    fn initial_design_is_distinct_and_capped() {
        let space = SearchSpace::uniform(2, 0.0, 1.0, 2, GridScale::Linear).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let design = initial_design(&space, &Ledger::default(), 10, &mut rng);
        assert_eq!(design.len(), 4);
        let unique: HashSet<_> = design.iter().collect();
        assert_eq!(unique.len(), 4);
    }

    #[test]
    fn failed_evaluations_are_dropped_but_remembered() {
        let space = SearchSpace::uniform(1, 0.0, 1.0, 4, GridScale::Linear).unwrap();
        let mut history = History::new();
        let mut ledger = Ledger::default();
        let objective = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] };
        let (added, best) = ledger.evaluate_batch(
            &space,
            &mut history,
            &objective,
            &[vec![3], vec![1], vec![0]],
        );
        assert_eq!(added, vec![0, 1]);
        assert_eq!(best, vec![0]);
        assert_eq!(ledger.dropped, 1);
        assert!(ledger.contains(&[3]));
        assert_eq!(ledger.remaining(&space), Some(1));
    }
}
