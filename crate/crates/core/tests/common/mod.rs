//! Independent reference implementations used by the integration tests.
//! None of these share code with the library paths they check.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use score_bo::space::EvaluationRecord;

/// Posterior of a squared-exponential GP by explicit matrix inversion, in
/// output units. Targets are standardized with the population std (1 when
/// constant) and `jitter` is added in standardized units, mirroring the
/// model's contract.
pub struct DenseGp {
    xs: Vec<f64>,
    k_inv: DMatrix<f64>,
    alpha: DVector<f64>,
    mean: f64,
    scale: f64,
    lengthscale: f64,
    signal: f64,
}

impl DenseGp {
    pub fn fit(
        xs: &[f64],
        ys: &[f64],
        lengthscale: f64,
        signal_variance: f64,
        noise_variance: f64,
        jitter: f64,
    ) -> Self {
        let n = xs.len();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let signal = signal_variance / (scale * scale);
        let noise = noise_variance / (scale * scale);
        let k = DMatrix::from_fn(n, n, |i, j| {
            let r = (xs[i] - xs[j]) / lengthscale;
            signal * (-0.5 * r * r).exp() + if i == j { noise + jitter } else { 0.0 }
        });
        let k_inv = k.try_inverse().expect("dense kernel matrix is singular");
        let y = DVector::from_iterator(n, ys.iter().map(|y| (y - mean) / scale));
        let alpha = &k_inv * y;
        Self {
            xs: xs.to_vec(),
            k_inv,
            alpha,
            mean,
            scale,
            lengthscale,
            signal,
        }
    }

    /// Posterior (mean, std) in standardized units.
    pub fn predict_standardized(&self, x: f64) -> (f64, f64) {
        let kstar = DVector::from_iterator(
            self.xs.len(),
            self.xs.iter().map(|xi| {
                let r = (xi - x) / self.lengthscale;
                self.signal * (-0.5 * r * r).exp()
            }),
        );
        let mean = kstar.dot(&self.alpha);
        let var = self.signal - (kstar.transpose() * &self.k_inv * &kstar)[(0, 0)];
        (mean, var.max(0.0).sqrt())
    }

    pub fn predict(&self, x: f64) -> (f64, f64) {
        let (m, s) = self.predict_standardized(x);
        (m * self.scale + self.mean, s * self.scale)
    }

    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.mean) / self.scale
    }
}

/// Standard normal CDF from the all-positive series
/// `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum 2^n x^(2n+1) / (2n+1)!!`, which has
/// no cancellation and is accurate to a few ulps for `|x| <= 6`.
pub fn normal_cdf_reference(z: f64) -> f64 {
    let x = z.abs() / std::f64::consts::SQRT_2;
    let erf = if x > 6.0 {
        1.0
    } else {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-18 {
            n += 1.0;
            term *= 2.0 * x * x / (2.0 * n + 1.0);
            sum += term;
        }
        2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp() * sum
    };
    let upper = 0.5 * (1.0 + erf);
    if z >= 0.0 {
        upper
    } else {
        1.0 - upper
    }
}

/// Closed-form expected improvement for minimization on top of
/// [`normal_cdf_reference`].
pub fn ei_reference(mean: f64, std: f64, best: f64, zeta: f64) -> f64 {
    let imp = best - mean - zeta;
    if std < 1e-12 {
        return imp.max(0.0);
    }
    let z = imp / std;
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    imp * normal_cdf_reference(z) + std * pdf
}

/// Per-dimension `(best_value, count)` recomputed from scratch.
pub fn brute_force_projection(
    records: &[EvaluationRecord],
    dims: usize,
    grid_len: usize,
) -> Vec<Vec<Option<(f64, usize)>>> {
    let mut table = vec![vec![None; grid_len]; dims];
    for d in 0..dims {
        for i in 0..grid_len {
            let matching: Vec<f64> = records
                .iter()
                .filter(|r| r.indices[d] == i)
                .map(|r| r.value)
                .collect();
            if !matching.is_empty() {
                let best = matching.iter().copied().fold(f64::INFINITY, f64::min);
                table[d][i] = Some((best, matching.len()));
            }
        }
    }
    table
}
