//! Model configuration, sufficient statistics and the two reference
//! predictive densities (plug-in Gaussian and best equivariant Student-t).
//!
//! Densities are only exposed on the log scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::log_gamma_unchecked;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub d: usize,
    pub mu: Vec<f64>,
    /// Precision η = 1/σ².
    pub eta: f64,
}

impl ModelConfig {
    pub fn new(n: usize, d: usize, mu: Vec<f64>, eta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        if mu.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: mu.len(),
            });
        }
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta = {eta} must be positive")));
        }
        Ok(Self { n, d, mu, eta })
    }

    /// Canonical representative μ = √ξ·e₁, σ² = 1.
    pub fn from_xi(n: usize, d: usize, xi: f64) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "xi = {xi} must be finite and nonnegative"
            )));
        }
        let mut mu = vec![0.0; d.max(1)];
        mu[0] = xi.sqrt();
        Self::new(n, d, mu, 1.0)
    }

    pub fn sigma2(&self) -> f64 {
        1.0 / self.eta
    }

    /// Noncentrality ξ = η‖μ‖².
    pub fn xi(&self) -> f64 {
        self.eta * norm_sq(&self.mu)
    }
}

/// Sample mean, scaled deviance and sample count (x̄_l, s_l, l).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    pub xbar: Vec<f64>,
    pub s: f64,
    pub count: usize,
}

impl SufficientStats {
    pub fn new(xbar: Vec<f64>, s: f64, count: usize) -> Result<Self> {
        if xbar.is_empty() {
            return Err(Error::InvalidArgument("xbar must have at least one component".into()));
        }
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "s = {s} must be finite and nonnegative"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidArgument(format!("count = {count} must be at least 2")));
        }
        Ok(Self { xbar, s, count })
    }

    /// Mean and deviance Σ‖x_i − x̄‖² of raw observations.
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidArgument("no samples".into()))?;
        let d = first.len();
        let mut xbar = vec![0.0; d];
        for x in samples {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            for (m, v) in xbar.iter_mut().zip(x) {
                *m += v;
            }
        }
        let count = samples.len();
        xbar.iter_mut().for_each(|m| *m /= count as f64);
        let s = samples
            .iter()
            .map(|x| x.iter().zip(&xbar).map(|(v, m)| (v - m).powi(2)).sum::<f64>())
            .sum();
        Self::new(xbar, s, count)
    }

    pub fn dim(&self) -> usize {
        self.xbar.len()
    }

    fn scaled_norm(&self) -> f64 {
        self.count as f64 * norm_sq(&self.xbar)
    }

    /// w_l = l‖x̄_l‖²/s_l (infinite when s = 0 and x̄ ≠ 0).
    pub fn w(&self) -> f64 {
        self.scaled_norm() / self.s
    }

    /// u_l = w_l/(1 + w_l) ∈ [0, 1].
    pub fn u(&self) -> f64 {
        let num = self.scaled_norm();
        if num + self.s == 0.0 {
            0.0
        } else {
            num / (num + self.s)
        }
    }

    /// 1 − u_l computed without cancellation.
    pub fn one_minus_u(&self) -> f64 {
        let num = self.scaled_norm();
        if num + self.s == 0.0 {
            1.0
        } else {
            self.s / (num + self.s)
        }
    }

    /// Absorbs a future observation: (x̄_{l+1}, s_{l+1}) with
    /// x̄_{l+1} = x̄_l + (y − x̄_l)/(l + 1) and s_{l+1} = s_l + l‖y − x̄_l‖²/(l + 1).
    pub fn update(&self, y: &[f64]) -> Result<Self> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
            });
        }
        let l = self.count as f64;
        let xbar = self.xbar.iter().zip(y).map(|(m, v)| m + (v - m) / (l + 1.0)).collect();
        let dist2: f64 = self.xbar.iter().zip(y).map(|(m, v)| (v - m).powi(2)).sum();
        Ok(Self {
            xbar,
            s: self.s + l * dist2 / (l + 1.0),
            count: self.count + 1,
        })
    }
}

pub fn update_stats(stats: &SufficientStats, y: &[f64]) -> Result<SufficientStats> {
    stats.update(y)
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// log p̂_R(y | x̄, s): the best equivariant (right-invariant prior) predictive
/// density, a d-variate Student-t with (n − 1)d degrees of freedom.
///
/// `n` and `d` are read from `stats`.
pub fn best_equivariant_logpdf(y: &[f64], stats: &SufficientStats) -> Result<f64> {
    if y.len() != stats.dim() {
        return Err(Error::DimensionMismatch {
            expected: stats.dim(),
            got: y.len(),
        });
    }
    if !(stats.s > 0.0) {
        return Err(Error::SingularStatistic);
    }
    let n = stats.count as f64;
    let d = stats.dim() as f64;
    let log_c = log_gamma_unchecked(n * d / 2.0) - log_gamma_unchecked((n - 1.0) * d / 2.0);
    let scale = n / ((n + 1.0) * stats.s);
    let dist2: f64 = y.iter().zip(&stats.xbar).map(|(v, m)| (v - m).powi(2)).sum();
    Ok(log_c + 0.5 * d * (scale / std::f64::consts::PI).ln() - 0.5 * n * d * (scale * dist2).ln_1p())
}

/// log φ(y; μ̂, σ̂² I_d).
pub fn plug_in_logpdf(y: &[f64], mu_hat: &[f64], sigma2_hat: f64) -> Result<f64> {
    if y.len() != mu_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: mu_hat.len(),
            got: y.len(),
        });
    }
    if !(sigma2_hat > 0.0) || !sigma2_hat.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma2_hat = {sigma2_hat} must be positive"
        )));
    }
    let d = y.len() as f64;
    let dist2: f64 = y.iter().zip(mu_hat).map(|(v, m)| (v - m).powi(2)).sum();
    Ok(-0.5 * d * (LN_2PI + sigma2_hat.ln()) - 0.5 * dist2 / sigma2_hat)
}
