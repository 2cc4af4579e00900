//! Seeded samplers for the Gaussian model and the chi-square family.
//!
//! Every replicate owns an independent ChaCha8 stream addressed by
//! `(seed, stream_id)`, so results never depend on thread count or
//! scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// Bounds applied to sampled Beta-type ratios; keeps log(u) and log(1 − u) finite.
pub const U_MIN: f64 = 1e-300;
pub const U_MAX: f64 = 1.0 - 1e-16;

/// Address of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngState {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Stream of replicate `replicate` in trial `trial`: `trial·R + replicate`.
    pub fn for_replicate(seed: u64, trial: u64, replicate: u64, replicates_per_trial: u64) -> Self {
        Self::new(seed, trial * replicates_per_trial + replicate)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One draw from N_d(mean, variance·I). A zero variance returns `mean` exactly.
pub fn sample_iso_normal<R: Rng + ?Sized>(rng: &mut R, mean: &[f64], variance: f64) -> Result<Vec<f64>> {
    if mean.is_empty() {
        return Err(Error::InvalidArgument(
            "sample_iso_normal: dimension must be at least 1".into(),
        ));
    }
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample_iso_normal: variance = {variance} must be finite and nonnegative"
        )));
    }
    let sd = variance.sqrt();
    Ok(mean
        .iter()
        .map(|&m| {
            let z: f64 = rng.sample(StandardNormal);
            m + sd * z
        })
        .collect())
}

pub fn sample_chi2<R: Rng + ?Sized>(rng: &mut R, dof: f64) -> Result<f64> {
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample_chi2: dof = {dof} must be positive"
        )));
    }
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(format!("sample_chi2: dof = {dof}: {e}")))?;
    Ok(dist.sample(rng))
}

/// Noncentral chi-square as a Poisson(λ/2) mixture of central chi-squares
/// with `dof + 2K` degrees of freedom.
pub fn sample_noncentral_chi2<R: Rng + ?Sized>(rng: &mut R, dof: f64, noncentrality: f64) -> Result<f64> {
    if !(noncentrality >= 0.0) || !noncentrality.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample_noncentral_chi2: noncentrality = {noncentrality} must be finite and nonnegative"
        )));
    }
    let k = if noncentrality > 0.0 {
        let poisson = Poisson::new(0.5 * noncentrality)
            .map_err(|e| Error::InvalidArgument(format!("sample_noncentral_chi2: {e}")))?;
        poisson.sample(rng)
    } else {
        0.0
    };
    sample_chi2(rng, dof + 2.0 * k)
}

/// One draw of `(y, xbar, s)` under `model`: xbar ~ N_d(μ, σ²/n), s ~ σ²χ²_{(n−1)d},
/// y ~ N_d(μ, σ²), mutually independent. Draw order is xbar, s, y.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub y: Vec<f64>,
    pub xbar: Vec<f64>,
    pub s: f64,
}

pub fn sample_triplet<R: Rng + ?Sized>(rng: &mut R, model: &ModelConfig) -> Result<Triplet> {
    let sigma2 = model.sigma2();
    let n = model.n as f64;
    let xbar = sample_iso_normal(rng, &model.mu, sigma2 / n)?;
    let s = sigma2 * sample_chi2(rng, ((model.n - 1) * model.d) as f64)?;
    let y = sample_iso_normal(rng, &model.mu, sigma2)?;
    Ok(Triplet { y, xbar, s })
}

/// Draws u_l = X/(X + Y) with X ~ χ²_d(nξ) and Y ~ χ²_{(l−1)d}, clamped into
/// `[U_MIN, U_MAX]`.
///
/// The noncentrality is nξ for both l = n and l = n + 1, matching the
/// bounding ratio used for the high-dimensional domination argument. The
/// exact marginal law of u_{n+1} under the model has noncentrality (n + 1)ξ;
/// draw it from [`sample_triplet`] when the exact law is needed.
pub fn sample_noncentral_beta_u<R: Rng + ?Sized>(rng: &mut R, d: usize, l: usize, xi: f64, n: usize) -> Result<f64> {
    if d == 0 || n < 2 || (l != n && l != n + 1) {
        return Err(Error::InvalidArgument(format!(
            "sample_noncentral_beta_u: need d >= 1, n >= 2, l in {{n, n+1}} (d = {d}, n = {n}, l = {l})"
        )));
    }
    let num = sample_noncentral_chi2(rng, d as f64, n as f64 * xi)?;
    let den = sample_chi2(rng, ((l - 1) * d) as f64)?;
    let u = num / (num + den);
    Ok(if u.is_nan() { U_MIN } else { u.clamp(U_MIN, U_MAX) })
}
