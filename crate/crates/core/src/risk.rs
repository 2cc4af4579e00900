//! Monte Carlo estimation of Kullback–Leibler risk differences
//! R_KL(p̂_R) − R_KL(p̂_GM) = E[log p̂_GM(y|x̄,s) − log p̂_R(y|x̄,s)].
//!
//! Replicate r of trial t reads stream `t·R + r` of the cell seed. Replicate
//! values are collected in index order and summed sequentially, so estimates
//! are bitwise identical for every worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::GmPredictive;
use crate::error::{Error, Result};
use crate::model::{ModelConfig, SufficientStats};
use crate::prior::{PriorSpec, RhoVariant};
use crate::quadrature::QuadratureConfig;
use crate::sampling::{sample_triplet, RngState};

/// log of a predictive density relative to p̂_R, as a function of the
/// statistics before and after absorbing y.
pub trait LogDensityRatio: Sync {
    fn log_ratio_from_stats(&self, before: &SufficientStats, after: &SufficientStats) -> Result<f64>;
}

impl LogDensityRatio for GmPredictive {
    fn log_ratio_from_stats(&self, before: &SufficientStats, after: &SufficientStats) -> Result<f64> {
        GmPredictive::log_ratio_from_stats(self, before, after)
    }
}

/// p̂_R compared with itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl LogDensityRatio for Identity {
    fn log_ratio_from_stats(&self, _: &SufficientStats, _: &SufficientStats) -> Result<f64> {
        Ok(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    /// Mean of the trial means.
    pub mean: f64,
    /// Standard deviation of the trial means over √trials; 0 for one trial.
    pub std_error: f64,
    pub replicates: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Estimates E[log ratio] under `model` with `trials` independent trials of
/// `replicates` draws each.
pub fn risk_diff_for_model<C: LogDensityRatio + ?Sized>(
    model: &ModelConfig,
    comparator: &C,
    replicates: usize,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if replicates == 0 || trials == 0 {
        return Err(Error::InvalidArgument(format!(
            "replicates = {replicates} and trials = {trials} must both be at least 1"
        )));
    }
    let total = replicates as u64 * trials as u64;
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|stream_id| {
            let mut rng = RngState::new(seed, stream_id).rng();
            let t = sample_triplet(&mut rng, model)?;
            let before = SufficientStats::new(t.xbar, t.s, model.n)?;
            let after = before.update(&t.y)?;
            let v = comparator.log_ratio_from_stats(&before, &after)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    stream_id,
                    detail: format!("log ratio {v} at s = {}, w = {}", before.s, before.w()),
                })
            }
        })
        .collect::<Result<_>>()?;

    let trial_means: Vec<f64> = values
        .chunks(replicates)
        .map(|c| c.iter().sum::<f64>() / replicates as f64)
        .collect();
    let k = trials as f64;
    let mean = trial_means.iter().sum::<f64>() / k;
    let std_error = if trials > 1 {
        (trial_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        0.0
    };
    Ok(RiskEstimate {
        mean,
        std_error,
        replicates,
        trials,
        seed,
    })
}

/// Risk difference of the Gaussian-mixture Bayes density over p̂_R at
/// noncentrality ξ, using μ = √ξ e₁ and σ² = 1.
pub fn kl_risk_diff_mc(
    xi: f64,
    spec: &PriorSpec,
    n: usize,
    d: usize,
    replicates: usize,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if spec.n != n || spec.d != d {
        return Err(Error::InvalidArgument(format!(
            "prior built for (n, d) = ({}, {}) but asked for ({n}, {d})",
            spec.n, spec.d
        )));
    }
    let gm = GmPredictive::new(spec, &QuadratureConfig::default())?;
    risk_diff_for_model(&ModelConfig::from_xi(n, d, xi)?, &gm, replicates, trials, seed)
}

pub const DEFAULT_REPLICATES: usize = 5000;
pub const DEFAULT_TRIALS: usize = 10;

/// {0} followed by 20 log-spaced points from 1 to 1000.
pub fn default_xi_values() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..20).map(|i| 10f64.powf(3.0 * i as f64 / 19.0)))
        .collect()
}

/// {0.05, 0.25, 0.5, …, 1.75, 2}.
pub fn default_nu_values() -> Vec<f64> {
    std::iter::once(0.05).chain((1..=8).map(|i| 0.25 * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub d: usize,
    pub n: usize,
    pub xi_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    pub prior_variant: RhoVariant,
    pub replicates: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentGrid {
    pub fn new(d: usize, n: usize, prior_variant: RhoVariant) -> Self {
        Self {
            d,
            n,
            xi_values: default_xi_values(),
            nu_values: default_nu_values(),
            prior_variant,
            replicates: DEFAULT_REPLICATES,
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.xi_values.is_empty() || self.nu_values.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one xi and one nu".into()));
        }
        if let Some(xi) = self.xi_values.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "xi = {xi} must be finite and nonnegative"
            )));
        }
        if let Some(nu) = self.nu_values.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu = {nu} must be positive")));
        }
        if self.replicates == 0 || self.trials == 0 || self.n < 2 || self.d == 0 {
            return Err(Error::InvalidArgument(
                "grid needs replicates, trials, d >= 1 and n >= 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub xi: f64,
    pub nu: f64,
    pub estimate: Result<RiskEstimate>,
}

impl GridCell {
    pub fn failed(&self) -> bool {
        self.estimate.is_err()
    }
}

/// Every (ξ, ν) cell of the grid, in ascending (ξ, ν) order. Each cell uses
/// the grid seed, so a cell's estimate does not depend on the rest of the
/// grid. A failing cell is reported in place and the run continues.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<GridCell>> {
    grid.validate()?;
    let mut xis = grid.xi_values.clone();
    let mut nus = grid.nu_values.clone();
    xis.sort_by(f64::total_cmp);
    nus.sort_by(f64::total_cmp);
    let quad = QuadratureConfig::default();
    let predictives: Vec<Result<GmPredictive>> = nus
        .iter()
        .map(|&nu| {
            PriorSpec::new(nu, grid.prior_variant, grid.n, grid.d).and_then(|spec| GmPredictive::new(&spec, &quad))
        })
        .collect();
    let mut cells = Vec::with_capacity(xis.len() * nus.len());
    for &xi in &xis {
        let model = ModelConfig::from_xi(grid.n, grid.d, xi)?;
        for (&nu, gm) in nus.iter().zip(&predictives) {
            let estimate = gm
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|gm| risk_diff_for_model(&model, gm, grid.replicates, grid.trials, grid.seed));
            cells.push(GridCell { xi, nu, estimate });
        }
    }
    Ok(cells)
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool
/// when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("threads must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
