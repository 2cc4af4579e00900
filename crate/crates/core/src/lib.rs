//! Bayesian predictive densities for a multivariate Gaussian model with
//! unknown mean and variance.
//!
//! The crate evaluates the best equivariant (Student-t) predictive density,
//! the Bayes predictive density under a family of Gaussian-mixture priors,
//! Monte Carlo estimates of their Kullback–Leibler risk difference, and the
//! threshold ν* below which the mixture prior is known to dominate.

// `!(x > 0.0)` deliberately rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod bounds;
pub mod checks;
pub mod cli;
pub mod error;
pub mod model;
pub mod prior;
pub mod quadrature;
pub mod risk;
pub mod sampling;
pub mod specfun;

pub use bayes::{
    brute_force_predictive_logpdf, gm_predictive_logpdf, j_integral, log_marginal_rho, marginal_rho, GmPredictive,
    JIntegrator,
};
pub use bounds::{g_fn, h_fn, nu_star, verify_lemma_bounds, LemmaBoundsReport, NuStar};
pub use error::{Error, Result};
pub use model::{best_equivariant_logpdf, plug_in_logpdf, update_stats, ModelConfig, SufficientStats};
pub use prior::{rho_eval, validate_sandwich, PriorSpec, RhoVariant, SandwichReport};
pub use quadrature::{QuadratureConfig, Scheme};
pub use risk::{kl_risk_diff_mc, run_grid, ExperimentGrid, GridCell, RiskEstimate};
pub use sampling::RngState;
