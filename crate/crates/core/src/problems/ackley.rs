use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::space::{GridScale, SearchSpace};

/// The D-dimensional Ackley function with the usual constants
/// `a = 20`, `b = 0.2`, `c = 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckleySpec {
    pub dims: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lo: f64,
    pub hi: f64,
}

impl AckleySpec {
    pub fn new(dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::config("dims", "must be >= 1"));
        }
        Ok(Self {
            dims,
            a: 20.0,
            b: 0.2,
            c: 2.0 * PI,
            lo: -5.0,
            hi: 10.0,
        })
    }

    /// `dims` identical grids on `[lo, hi]`. With the default 61 points the
    /// step is 0.25 and the origin lies on the grid.
    pub fn search_space(&self, points_per_dim: usize) -> Result<SearchSpace> {
        SearchSpace::uniform(
            self.dims,
            self.lo,
            self.hi,
            points_per_dim,
            GridScale::Linear,
        )
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        ackley(point, self)
    }
}

/// `-a·exp(-b·sqrt(mean x²)) - exp(mean cos(c·x)) + a + e`.
///
/// Grouped as `a(1 - exp(..)) + (e - exp(..))` so both terms are
/// non-negative and the origin evaluates to exactly zero.
pub fn ackley(point: &[f64], spec: &AckleySpec) -> f64 {
    let n = point.len() as f64;
    let mean_sq = point.iter().map(|x| x * x).sum::<f64>() / n;
    let mean_cos = point.iter().map(|x| (spec.c * x).cos()).sum::<f64>() / n;
    spec.a * (1.0 - (-spec.b * mean_sq.sqrt()).exp()) + (1f64.exp() - mean_cos.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_zero_in_any_dimension() {
        for d in [1, 2, 10, 200] {
            let spec = AckleySpec::new(d).unwrap();
            assert_eq!(ackley(&vec![0.0; d], &spec), 0.0);
        }
    }

    #[test]
    fn one_dimensional_value_at_one() {
        let spec = AckleySpec::new(1).unwrap();
        let expected = 20.0 * (1.0 - (-0.2f64).exp());
        assert!((ackley(&[1.0], &spec) - expected).abs() < 1e-12);
        assert!((expected - 3.625_384_9).abs() < 1e-7);
    }

    #[test]
    fn permutation_invariant() {
        let spec = AckleySpec::new(4).unwrap();
        let x = [0.3, -2.5, 7.25, 1.0];
        let y = [7.25, 1.0, 0.3, -2.5];
        assert_eq!(ackley(&x, &spec), ackley(&y, &spec));
    }

    #[test]
    fn non_negative_on_a_2d_grid_and_zero_only_at_origin() {
        let spec = AckleySpec::new(2).unwrap();
        let space = spec.search_space(61).unwrap();
        let g = space.grid(0).values();
        for &x in g {
            for &y in g {
                let v = ackley(&[x, y], &spec);
                assert!(v >= 0.0);
                assert_eq!(v == 0.0, x == 0.0 && y == 0.0, "({x}, {y}) -> {v}");
            }
        }
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(AckleySpec::new(0).is_err());
    }
}
