//! Discrete search spaces and the evaluation history shared by both optimizers.
//!
//! Every parameter lives on an ordered mesh of real values. Candidates are
//! addressed by grid indices (one per dimension); the real-valued point is
//! always derived from the indices so the two can never drift apart.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a grid mesh was generated. Purely descriptive once the values exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// Ordered, strictly increasing list of values one parameter may take.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    name: String,
    values: Vec<f64>,
    scale: GridScale,
}

impl ParameterGrid {
    pub fn new(name: impl Into<String>, values: Vec<f64>, scale: GridScale) -> Result<Self> {
        let name = name.into();
        if values.len() < 2 {
            return Err(Error::config(&name, "a grid needs at least two values"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::config(&name, format!("non-finite grid value {v}")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(
                &name,
                "grid values must be strictly increasing",
            ));
        }
        if scale == GridScale::Log && values[0] <= 0.0 {
            return Err(Error::config(
                &name,
                "log-scaled grid values must be positive",
            ));
        }
        Ok(Self {
            name,
            values,
            scale,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> GridScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Index of the grid value closest to `x` (lower index on exact ties).
    pub fn nearest_index(&self, x: f64) -> usize {
        let pos = self.values.partition_point(|&v| v < x);
        if pos == 0 {
            return 0;
        }
        if pos == self.values.len() {
            return pos - 1;
        }
        if (x - self.values[pos - 1]) <= (self.values[pos] - x) {
            pos - 1
        } else {
            pos
        }
    }
}

/// Builds a grid of `count` values between `lo` and `hi`, both included.
///
/// Linear grids are uniformly spaced; log grids are uniform in `log10`.
pub fn make_grid(
    name: impl Into<String>,
    lo: f64,
    hi: f64,
    count: usize,
    scale: GridScale,
) -> Result<ParameterGrid> {
    let name = name.into();
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::config(
            &name,
            format!("grid bounds must be finite with lo < hi (got lo={lo}, hi={hi})"),
        ));
    }
    if count < 2 {
        return Err(Error::config(
            &name,
            format!("grid count must be >= 2 (got {count})"),
        ));
    }
    let last = (count - 1) as f64;
    let values: Vec<f64> = match scale {
        GridScale::Linear => (0..count)
            .map(|i| match i {
                0 => lo,
                _ if i == count - 1 => hi,
                _ => lo + (hi - lo) * i as f64 / last,
            })
            .collect(),
        GridScale::Log => {
            if lo <= 0.0 {
                return Err(Error::config(
                    &name,
                    format!("log grid needs lo > 0 (got {lo})"),
                ));
            }
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    _ if i == count - 1 => hi,
                    _ => 10f64.powf(a + (b - a) * i as f64 / last),
                })
                .collect()
        }
    };
    ParameterGrid::new(name, values, scale)
}

/// Cartesian product of per-parameter grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    grids: Vec<ParameterGrid>,
}

impl SearchSpace {
    pub fn new(grids: Vec<ParameterGrid>) -> Result<Self> {
        if grids.is_empty() {
            return Err(Error::config(
                "space",
                "a search space needs at least one dimension",
            ));
        }
        Ok(Self { grids })
    }

    /// `dims` copies of the same grid, named `x0`, `x1`, ...
    pub fn uniform(dims: usize, lo: f64, hi: f64, count: usize, scale: GridScale) -> Result<Self> {
        let grids = (0..dims)
            .map(|d| make_grid(format!("x{d}"), lo, hi, count, scale))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grids)
    }

    pub fn dims(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[ParameterGrid] {
        &self.grids
    }

    pub fn grid(&self, d: usize) -> &ParameterGrid {
        &self.grids[d]
    }

    /// Number of distinct combinations. Stored as a float since it overflows
    /// any machine word long before 200 dimensions.
    pub fn total_combinations(&self) -> f64 {
        self.grids.iter().map(|g| g.len() as f64).product()
    }

    pub fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if indices.len() != self.dims() {
            return Err(Error::InvalidIndices {
                indices: indices.to_vec(),
                reason: format!("expected {} indices", self.dims()),
            });
        }
        for (d, (&i, g)) in indices.iter().zip(&self.grids).enumerate() {
            if i >= g.len() {
                return Err(Error::InvalidIndices {
                    indices: indices.to_vec(),
                    reason: format!("index {i} out of range for dimension {d} (len {})", g.len()),
                });
            }
        }
        Ok(())
    }

    /// Real-valued point addressed by `indices`. Panics on out-of-range
    /// indices; use [`SearchSpace::check_indices`] on untrusted input.
    pub fn point(&self, indices: &[usize]) -> Vec<f64> {
        indices
            .iter()
            .zip(&self.grids)
            .map(|(&i, g)| g.value(i))
            .collect()
    }

    pub fn nearest_indices(&self, point: &[f64]) -> Vec<usize> {
        point
            .iter()
            .zip(&self.grids)
            .map(|(&x, g)| g.nearest_index(x))
            .collect()
    }

    /// Grid position of each index rescaled to `[0, 1]`.
    pub fn unit_coordinates(&self, indices: &[usize]) -> Vec<f64> {
        indices
            .iter()
            .zip(&self.grids)
            .map(|(&i, g)| i as f64 / (g.len() - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub indices: Vec<usize>,
    pub point: Vec<f64>,
    pub value: f64,
    pub eval_id: usize,
    pub wall_time: Duration,
}

/// Append-only log of successful evaluations, tracking the incumbent.
#[derive(Debug, Clone, Default)]
pub struct History {
    records: Vec<EvaluationRecord>,
    best: Option<usize>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> &[EvaluationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn best(&self) -> Option<&EvaluationRecord> {
        self.best.map(|i| &self.records[i])
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best().map(|r| r.value)
    }

    /// Appends one evaluation. The incumbent only moves on strict
    /// improvement, so ties keep the earliest record.
    ///
    /// Non-finite values are rejected and leave the history untouched.
    pub fn record_evaluation(
        &mut self,
        space: &SearchSpace,
        indices: &[usize],
        value: f64,
        wall_time: Duration,
    ) -> Result<&EvaluationRecord> {
        space.check_indices(indices)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteValue {
                indices: indices.to_vec(),
                value,
            });
        }
        let eval_id = self.records.len();
        self.records.push(EvaluationRecord {
            indices: indices.to_vec(),
            point: space.point(indices),
            value,
            eval_id,
            wall_time,
        });
        match self.best_value() {
            Some(b) if value >= b => {}
            _ => self.best = Some(eval_id),
        }
        Ok(&self.records[eval_id])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ackley_mesh_has_quarter_steps_and_hits_zero() {
        let g = make_grid("x", -5.0, 10.0, 61, GridScale::Linear).unwrap();
        assert_eq!(g.len(), 61);
        assert_eq!(g.value(20), 0.0);
        for w in g.values().windows(2) {
            assert!((w[1] - w[0] - 0.25).abs() < 1e-12);
        }
        assert_eq!(g.value(60), 10.0);
    }

    #[test]
    fn two_point_grid_is_the_endpoints() {
        let g = make_grid("x", 0.0, 1.0, 2, GridScale::Linear).unwrap();
        assert_eq!(g.values(), &[0.0, 1.0]);
    }

    #[test]
    fn log_grid_spaces_decades() {
        let g = make_grid("io", 1e-12, 1e-6, 7, GridScale::Log).unwrap();
        for (k, &v) in g.values().iter().enumerate() {
            let expected = 10f64.powi(k as i32 - 12);
            assert!(
                (v - expected).abs() <= 1e-12 * expected,
                "{v} vs {expected}"
            );
        }
    }

    #[test]
    fn bad_bounds_name_the_parameter() {
        for (lo, hi, count, scale) in [
            (1.0, 1.0, 5, GridScale::Linear),
            (0.0, 1.0, 1, GridScale::Linear),
            (0.0, 1.0, 5, GridScale::Log),
            (f64::NAN, 1.0, 5, GridScale::Linear),
        ] {
            let err = make_grid("r_sh", lo, hi, count, scale).unwrap_err();
            assert!(err.to_string().contains("r_sh"), "{err}");
        }
    }

    #[test]
    fn grid_rejects_unsorted_values() {
        assert!(ParameterGrid::new("x", vec![0.0, 0.0], GridScale::Linear).is_err());
        assert!(ParameterGrid::new("x", vec![1.0, 0.0], GridScale::Linear).is_err());
        assert!(ParameterGrid::new("x", vec![0.0, f64::INFINITY], GridScale::Linear).is_err());
    }

    #[test]
    fn first_record_is_best_and_ties_keep_the_earlier_one() {
        let space = SearchSpace::uniform(2, 0.0, 1.0, 3, GridScale::Linear).unwrap();
        let mut h = History::new();
        h.record_evaluation(&space, &[0, 0], 5.0, Duration::ZERO)
            .unwrap();
        assert_eq!(h.best().unwrap().eval_id, 0);
        h.record_evaluation(&space, &[0, 1], 4.0, Duration::ZERO)
            .unwrap();
        h.record_evaluation(&space, &[0, 2], 4.0, Duration::ZERO)
            .unwrap();
        assert_eq!(h.best().unwrap().eval_id, 1);
        h.record_evaluation(&space, &[1, 2], 3.9, Duration::ZERO)
            .unwrap();
        assert_eq!(h.best().unwrap().eval_id, 3);
        assert_eq!(h.records()[3].point, vec![0.5, 1.0]);
    }

    #[test]
    fn non_finite_values_are_rejected_with_indices() {
        let space = SearchSpace::uniform(2, 0.0, 1.0, 3, GridScale::Linear).unwrap();
        let mut h = History::new();
        let err = h
            .record_evaluation(&space, &[2, 1], f64::NAN, Duration::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { ref indices, .. } if indices == &[2, 1]));
        assert!(h.is_empty());
        assert!(h
            .record_evaluation(&space, &[3, 1], 1.0, Duration::ZERO)
            .is_err());
    }

    #[test]
    fn total_combinations_does_not_overflow() {
        let space = SearchSpace::uniform(200, -5.0, 10.0, 61, GridScale::Linear).unwrap();
        assert!(space.total_combinations() > 1e300);
    }
}
