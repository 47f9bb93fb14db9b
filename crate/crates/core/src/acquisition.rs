//! Expected improvement for minimization.
//!
//! `EI = (f* - mu - zeta) * Phi(z) + sigma * phi(z)` with
//! `z = (f* - mu - zeta) / sigma`, where `Phi`/`phi` are the standard normal
//! CDF and density. Both optimizers evaluate it in the surrogate's
//! standardized target scale so `zeta` is independent of the problem's units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::PosteriorStats;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Below this posterior std the deterministic limit is used.
pub const DEGENERATE_STD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionParams {
    /// Incumbent value `f(x*)`, already in the same scale as the posterior.
    pub best_value: f64,
    /// Exploration offset.
    pub zeta: f64,
}

impl AcquisitionParams {
    pub fn new(best_value: f64, zeta: f64) -> Result<Self> {
        if !best_value.is_finite() {
            return Err(Error::config("best_value", "must be finite"));
        }
        if !zeta.is_finite() || zeta < 0.0 {
            return Err(Error::config(
                "zeta",
                format!("must be finite and >= 0 (got {zeta})"),
            ));
        }
        Ok(Self { best_value, zeta })
    }
}

/// `zeta_t = initial * decay^t`, with `t` the optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSchedule {
    pub initial: f64,
    pub decay: f64,
}

impl Default for ZetaSchedule {
    fn default() -> Self {
        Self {
            initial: 0.01,
            decay: 1.0,
        }
    }
}

impl ZetaSchedule {
    pub fn constant(zeta: f64) -> Self {
        Self {
            initial: zeta,
            decay: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.initial.is_finite() || self.initial < 0.0 {
            return Err(Error::config("zeta.initial", "must be finite and >= 0"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::config("zeta.decay", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn at(&self, iteration: usize) -> f64 {
        self.initial * self.decay.powi(iteration.min(i32::MAX as usize) as i32)
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn expected_improvement(stats: PosteriorStats, params: AcquisitionParams) -> f64 {
    let improvement = params.best_value - stats.mean - params.zeta;
    if stats.std < DEGENERATE_STD {
        return improvement.max(0.0);
    }
    let z = improvement / stats.std;
    (improvement * normal_cdf(z) + stats.std * normal_pdf(z)).max(0.0)
}

/// Expected improvement of every posterior, in order.
pub fn score_grid(posteriors: &[PosteriorStats], params: AcquisitionParams) -> Vec<f64> {
    posteriors
        .iter()
        .map(|&s| expected_improvement(s, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(mean: f64, std: f64) -> PosteriorStats {
        PosteriorStats { mean, std }
    }

    fn ap(best: f64, zeta: f64) -> AcquisitionParams {
        AcquisitionParams::new(best, zeta).unwrap()
    }

    #[test]
    fn symmetric_point_is_the_density_at_zero() {
        let ei = expected_improvement(ps(0.0, 1.0), ap(0.0, 0.0));
        assert!((ei - 0.398_942_280_4).abs() < 1e-10);
    }

    #[test]
    fn zero_std_gives_deterministic_improvement() {
        assert_eq!(expected_improvement(ps(0.0, 0.0), ap(0.5, 0.0)), 0.5);
        assert_eq!(expected_improvement(ps(1.0, 1e-13), ap(0.5, 0.0)), 0.0);
    }

    #[test]
    fn printed_example_value() {
        // d = -0.6, z = -0.3: -0.6 * Phi(-0.3) + 2 * phi(-0.3)
        let ei = expected_improvement(ps(1.0, 2.0), ap(0.5, 0.1));
        assert!((ei - 0.533_52).abs() < 1e-4, "{ei}");
    }

    #[test]
    fn score_grid_is_elementwise() {
        let posts = [ps(0.3, 0.2), ps(-1.0, 0.0), ps(2.0, 1.5)];
        let params = ap(0.1, 0.01);
        let scores = score_grid(&posts, params);
        for (s, p) in scores.iter().zip(posts) {
            assert_eq!(*s, expected_improvement(p, params));
        }
        let same = score_grid(&[ps(1.0, 1.0); 4], params);
        assert!(same.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn params_are_validated() {
        assert!(AcquisitionParams::new(f64::NAN, 0.0).is_err());
        assert!(AcquisitionParams::new(0.0, -0.1).is_err());
        assert!(ZetaSchedule {
            initial: 0.1,
            decay: 0.0
        }
        .validate()
        .is_err());
        assert!(ZetaSchedule {
            initial: 0.1,
            decay: 1.5
        }
        .validate()
        .is_err());
    }

    #[test]
    fn zeta_schedule_decays_geometrically() {
        let s = ZetaSchedule {
            initial: 0.1,
            decay: 0.5,
        };
        assert_eq!(s.at(0), 0.1);
        assert!((s.at(3) - 0.0125).abs() < 1e-15);
        assert_eq!(ZetaSchedule::default().at(1000), 0.01);
    }
}
