//! Exact Gaussian-process regression with a squared-exponential kernel.
//!
//! Targets are standardized inside the model (zero mean, unit variance) and
//! the kernel's signal and noise variances, given in output units, are
//! rescaled into that space. Predictions come back in output units unless
//! the `_standardized` variants are used.
//!
//! The same engine serves the per-dimension 1D surrogates of the SCORE
//! optimizer and the joint surrogate of the baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest diagonal jitter tried before a fit is declared failed.
pub const MAX_JITTER: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    #[default]
    SquaredExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// In input units.
    pub lengthscale: f64,
    /// Prior variance of the latent function, output units squared.
    pub signal_variance: f64,
    /// Observation noise, output units squared.
    pub noise_variance: f64,
    /// Diagonal addition in the standardized space.
    pub jitter: f64,
}

impl KernelConfig {
    pub const DEFAULT_JITTER: f64 = 1e-12;
    /// Noise relative to the signal variance used by [`KernelConfig::for_targets`].
    pub const DEFAULT_RELATIVE_NOISE: f64 = 1e-3;

    pub fn new(lengthscale: f64, signal_variance: f64, noise_variance: f64) -> Self {
        Self {
            kind: KernelKind::SquaredExponential,
            lengthscale,
            signal_variance,
            noise_variance,
            jitter: Self::DEFAULT_JITTER,
        }
    }

    /// Default hyperparameters for a dataset: signal variance equal to the
    /// sample variance of the targets (1 when they are all equal) and a
    /// noise variance of [`Self::DEFAULT_RELATIVE_NOISE`] times the signal.
    pub fn for_targets(targets: &[f64], lengthscale: f64) -> Self {
        let (_, std) = mean_std(targets);
        let signal = if std > 0.0 {
            (std * std).max(1e-12)
        } else {
            1.0
        };
        Self::new(lengthscale, signal, signal * Self::DEFAULT_RELATIVE_NOISE)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lengthscale", self.lengthscale),
            ("signal_variance", self.signal_variance),
            ("noise_variance", self.noise_variance),
            ("jitter", self.jitter),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::config(*name, format!("must be finite (got {v})")));
        }
        if self.lengthscale <= 0.0 {
            return Err(Error::config("lengthscale", "must be > 0"));
        }
        if self.signal_variance <= 0.0 {
            return Err(Error::config("signal_variance", "must be > 0"));
        }
        if self.noise_variance < 0.0 {
            return Err(Error::config("noise_variance", "must be >= 0"));
        }
        if self.jitter < 1e-12 {
            return Err(Error::config("jitter", "must be >= 1e-12"));
        }
        Ok(())
    }

    /// Kernel value in output units.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        self.signal_variance * self.correlation(a, b)
    }

    fn correlation(&self, a: &[f64], b: &[f64]) -> f64 {
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        match self.kind {
            KernelKind::SquaredExponential => {
                (-0.5 * sq / (self.lengthscale * self.lengthscale)).exp()
            }
        }
    }
}

/// Pointwise posterior of the latent function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorStats {
    pub mean: f64,
    pub std: f64,
}

/// A fitted, immutable Gaussian process.
#[derive(Debug, Clone)]
pub struct GpModel {
    train_inputs: Vec<Vec<f64>>,
    train_targets: Vec<f64>,
    target_mean: f64,
    target_std: f64,
    kernel: KernelConfig,
    jitter: f64,
    /// Row-major lower-triangular factor of the standardized kernel matrix.
    chol: Vec<f64>,
    alpha: Vec<f64>,
}

/// Fits a GP to `(inputs, targets)`.
///
/// If the Cholesky factorization fails the jitter is raised tenfold until it
/// succeeds or passes [`MAX_JITTER`].
pub fn gp_fit(inputs: &[Vec<f64>], targets: &[f64], kernel: &KernelConfig) -> Result<GpModel> {
    kernel.validate()?;
    let n = inputs.len();
    if n == 0 {
        return Err(Error::Surrogate("no training data".into()));
    }
    if targets.len() != n {
        return Err(Error::Surrogate(format!(
            "{n} inputs but {} targets",
            targets.len()
        )));
    }
    let d = inputs[0].len();
    if inputs.iter().any(|x| x.len() != d) {
        return Err(Error::Surrogate("inputs of mixed dimensionality".into()));
    }
    if targets.iter().any(|y| !y.is_finite()) || inputs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Surrogate("non-finite training data".into()));
    }

    let (target_mean, mut target_std) = mean_std(targets);
    if target_std == 0.0 {
        target_std = 1.0;
    }
    let scaled: Vec<f64> = targets
        .iter()
        .map(|y| (y - target_mean) / target_std)
        .collect();

    let var_scale = target_std * target_std;
    let signal = kernel.signal_variance / var_scale;
    let noise = kernel.noise_variance / var_scale;

    let mut base = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = signal * kernel.correlation(&inputs[i], &inputs[j]);
            base[i * n + j] = k;
            base[j * n + i] = k;
        }
    }

    let mut jitter = kernel.jitter;
    loop {
        let mut chol = base.clone();
        for i in 0..n {
            chol[i * n + i] += noise + jitter;
        }
        if cholesky_in_place(&mut chol, n) {
            let mut alpha = scaled.clone();
            forward_substitute(&chol, n, &mut alpha);
            backward_substitute_transposed(&chol, n, &mut alpha);
            return Ok(GpModel {
                train_inputs: inputs.to_vec(),
                train_targets: scaled,
                target_mean,
                target_std,
                kernel: *kernel,
                jitter,
                chol,
                alpha,
            });
        }
        jitter *= 10.0;
        if jitter > MAX_JITTER {
            return Err(Error::Surrogate(format!(
                "Cholesky failed on {n} points even with jitter {MAX_JITTER:e}"
            )));
        }
        log::debug!("Cholesky failed, raising jitter to {jitter:e}");
    }
}

impl GpModel {
    pub fn len(&self) -> usize {
        self.train_inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_inputs.is_empty()
    }

    pub fn input_dims(&self) -> usize {
        self.train_inputs[0].len()
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn target_std(&self) -> f64 {
        self.target_std
    }

    /// Training targets after standardization.
    pub fn train_targets(&self) -> &[f64] {
        &self.train_targets
    }

    /// Jitter that made the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    /// The matrix that was factorized, standardized units, row-major.
    pub fn kernel_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let var_scale = self.target_std * self.target_std;
        let diag = self.kernel.noise_variance / var_scale + self.jitter;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = self
                    .kernel
                    .eval(&self.train_inputs[i], &self.train_inputs[j])
                    / var_scale;
            }
            k[i * n + i] += diag;
        }
        k
    }

    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_std
    }

    pub fn predict(&self, queries: &[Vec<f64>]) -> Vec<PosteriorStats> {
        queries
            .iter()
            .map(|q| {
                let s = self.predict_one_standardized(q);
                PosteriorStats {
                    mean: s.mean * self.target_std + self.target_mean,
                    std: s.std * self.target_std,
                }
            })
            .collect()
    }

    /// Posterior in the model's standardized target scale.
    pub fn predict_standardized(&self, queries: &[Vec<f64>]) -> Vec<PosteriorStats> {
        queries
            .iter()
            .map(|q| self.predict_one_standardized(q))
            .collect()
    }

    fn predict_one_standardized(&self, q: &[f64]) -> PosteriorStats {
        assert_eq!(q.len(), self.input_dims(), "query dimensionality mismatch");
        let n = self.len();
        let var_scale = self.target_std * self.target_std;
        let mut kstar: Vec<f64> = self
            .train_inputs
            .iter()
            .map(|x| self.kernel.eval(x, q) / var_scale)
            .collect();
        let mean = kstar.iter().zip(&self.alpha).map(|(k, a)| k * a).sum();
        forward_substitute(&self.chol, n, &mut kstar);
        let explained: f64 = kstar.iter().map(|v| v * v).sum();
        let prior = self.kernel.signal_variance / var_scale;
        PosteriorStats {
            mean,
            std: (prior - explained).max(0.0).sqrt(),
        }
    }
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Overwrites the lower triangle of `a` with its Cholesky factor and zeroes
/// the strict upper triangle. Returns false if `a` is not positive definite.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if diag.is_nan() || diag <= 0.0 || diag.is_infinite() {
            return false;
        }
        let ljj = diag.sqrt();
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
        for k in (j + 1)..n {
            a[j * n + k] = 0.0;
        }
    }
    true
}

/// Solves `L x = b` in place.
fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        let s: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
        b[i] = (b[i] - s) / l[i * n + i];
    }
}

/// Solves `Lᵀ x = b` in place.
fn backward_substitute_transposed(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
