use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acquisition::ZetaSchedule;
use crate::baseline::BoConfig;
use crate::engine::{KernelOverrides, ScoreConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Score,
    Bo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Score => "score",
            Method::Bo => "bo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Ackley,
    Sdm,
}

/// One experiment, read from a flat JSON document. Every field has a
/// default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub problem: ProblemKind,
    /// Ackley dimensionality; the single-diode problem always has 5.
    pub dims: usize,
    /// Ackley grid: `grid_points` values on `[grid_lo, grid_hi]`.
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    /// Initial design size; `None` means twice the dimensionality.
    pub n_init: Option<usize>,
    pub batch_size: usize,
    pub max_evals: usize,
    pub seed: u64,
    /// Seeds used by `sweep`.
    pub seeds: Vec<u64>,
    pub zeta_initial: f64,
    pub zeta_decay: f64,
    /// Grid steps for SCORE, unit-cube units for the baseline.
    pub lengthscale: Option<f64>,
    pub signal_variance: Option<f64>,
    pub noise_variance: Option<f64>,
    /// Likelihood noise as a fraction of each fit's signal
    /// variance. Ignored when `noise_variance` is set.
    pub noise_fraction: Option<f64>,
    pub jitter: Option<f64>,
    pub temperature: f64,
    pub candidate_pool_size: usize,
    /// Datasheet fixture for `sdm`; the built-in synthetic sheet if unset.
    pub datasheet: Option<PathBuf>,
    pub out: PathBuf,
    /// Score dimensions (SCORE) or sweep seeds concurrently.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Score,
            problem: ProblemKind::Ackley,
            dims: 10,
            grid_lo: -5.0,
            grid_hi: 10.0,
            grid_points: 61,
            n_init: None,
            batch_size: 1,
            max_evals: 300,
            seed: 0,
            seeds: (0..10).collect(),
            zeta_initial: 0.01,
            zeta_decay: 1.0,
            lengthscale: None,
            signal_variance: None,
            noise_variance: None,
            noise_fraction: None,
            jitter: None,
            temperature: 0.1,
            candidate_pool_size: 1000,
            datasheet: None,
            out: PathBuf::from("out"),
            parallel: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)?;
        Ok(config)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(e) => Error::Parse {
                what: format!("config {}", path.display()),
                reason: e.to_string(),
            },
            e => e,
        })
    }

    /// Dimensionality of the search space the config describes.
    pub fn problem_dims(&self) -> usize {
        match self.problem {
            ProblemKind::Ackley => self.dims,
            ProblemKind::Sdm => 5,
        }
    }

    pub fn n_init(&self) -> usize {
        self.n_init.unwrap_or(2 * self.problem_dims())
    }

    pub fn zeta(&self) -> ZetaSchedule {
        ZetaSchedule {
            initial: self.zeta_initial,
            decay: self.zeta_decay,
        }
    }

    fn kernel_overrides(&self) -> KernelOverrides {
        KernelOverrides {
            lengthscale: None,
            signal_variance: self.signal_variance,
            noise_variance: self.noise_variance,
            jitter: self.jitter,
        }
    }

    pub fn score_config(&self, seed: u64) -> ScoreConfig {
        let defaults = ScoreConfig::default();
        ScoreConfig {
            batch_size: self.batch_size,
            seed,
            zeta: self.zeta(),
            lengthscale_steps: self.lengthscale.unwrap_or(defaults.lengthscale_steps),
            noise_fraction: self.noise_fraction.unwrap_or(defaults.noise_fraction),
            kernel: self.kernel_overrides(),
            temperature: self.temperature,
            parallel: self.parallel,
        }
    }

    pub fn bo_config(&self, seed: u64) -> BoConfig {
        let defaults = BoConfig::default();
        BoConfig {
            seed,
            zeta: self.zeta(),
            candidate_pool_size: self.candidate_pool_size,
            lengthscale: self.lengthscale.unwrap_or(defaults.lengthscale),
            noise_fraction: self.noise_fraction.unwrap_or(defaults.noise_fraction),
            kernel: self.kernel_overrides(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 {
            return Err(Error::config("dims", "must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be >= 1"));
        }
        let n_init = self.n_init();
        if n_init == 0 {
            return Err(Error::config("n_init", "must be >= 1"));
        }
        if self.max_evals < n_init {
            return Err(Error::config(
                "max_evals",
                format!("must be >= n_init ({} < {n_init})", self.max_evals),
            ));
        }
        if self.method == Method::Bo && self.batch_size != 1 {
            return Err(Error::config(
                "batch_size",
                "the baseline evaluates one point per iteration",
            ));
        }
        self.score_config(self.seed).validate()?;
        self.bo_config(self.seed).validate()?;
        if let Some(v) = self.lengthscale {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config("lengthscale", "must be finite and > 0"));
            }
        }
        for (name, v) in [
            ("signal_variance", self.signal_variance),
            ("noise_variance", self.noise_variance),
            ("jitter", self.jitter),
        ] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::config(name, "must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.n_init(), 20);
        c.validate().unwrap();
    }

    #[test]
    fn fields_are_flat_and_unknown_keys_rejected() {
        let c = RunConfig::from_json(
            r#"{"method": "bo", "problem": "sdm", "max_evals": 50, "zeta_decay": 0.9}"#,
        )
        .unwrap();
        assert_eq!(c.method, Method::Bo);
        assert_eq!(c.problem, ProblemKind::Sdm);
        assert_eq!(c.n_init(), 10);
        assert!(RunConfig::from_json(r#"{"zeta": {"initial": 0.1}}"#).is_err());
    }

    #[test]
    fn budget_must_cover_initial_design() {
        let c = RunConfig {
            n_init: Some(20),
            max_evals: 10,
            ..Default::default()
        };
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let c = RunConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
