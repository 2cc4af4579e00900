//! The Gaussian-mixture prior family on (μ, η).
//!
//! Conditionally on λ ∈ (0, 1), μ ~ N_d(0, η⁻¹λ⁻¹(1 − λ) I) and the pair
//! (η, λ) carries the improper density η^a λ^a ρ(λ). The shape ν = d/2 + a + 1
//! is the public parameter; `RhoVariant` selects ρ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RhoVariant {
    /// ρ(λ) = (1 − λ)^{(n−1)d/2−1} {1 − (n−1)λ/n}^{−(n−2)d/2−ν}.
    LowDim,
    /// ρ(λ) = {1 − nλ/(n+1)}^{d/2−ν−1}, the lower end of the admissible band.
    HighDimLower,
    /// ρ(λ) = {1 − (n−1)λ/n}^{d/2−ν−1}, the upper end of the admissible band.
    HighDimUpper,
    /// ρ ≡ 1 with a = −2.
    Kato,
    /// ρ(λ) = (1 − λ)^b.
    MaruyamaStrawderman { b: f64 },
}

impl fmt::Display for RhoVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoVariant::LowDim => write!(f, "lowdim"),
            RhoVariant::HighDimLower => write!(f, "highdim-lower"),
            RhoVariant::HighDimUpper => write!(f, "highdim-upper"),
            RhoVariant::Kato => write!(f, "kato"),
            RhoVariant::MaruyamaStrawderman { b } => write!(f, "ms:{b}"),
        }
    }
}

impl From<RhoVariant> for String {
    fn from(v: RhoVariant) -> Self {
        v.to_string()
    }
}

impl TryFrom<String> for RhoVariant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for RhoVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowdim" => Ok(RhoVariant::LowDim),
            "highdim-lower" => Ok(RhoVariant::HighDimLower),
            "highdim-upper" => Ok(RhoVariant::HighDimUpper),
            "kato" => Ok(RhoVariant::Kato),
            other => {
                let b = other
                    .strip_prefix("ms:")
                    .and_then(|b| b.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidPrior(format!(
                            "unknown prior '{other}' (expected lowdim|highdim-lower|highdim-upper|kato|ms:<b>)"
                        ))
                    })?;
                Ok(RhoVariant::MaruyamaStrawderman { b })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub nu: f64,
    pub variant: RhoVariant,
    pub n: usize,
    pub d: usize,
}

impl PriorSpec {
    /// Checks the structural invariants: ν > 0, n ≥ 2, d ≥ 1, b > −1 for the
    /// (1 − λ)^b variant, and ν = d/2 − 1 for the Kato prior.
    ///
    /// Whether ν lies in the range where domination is proven is a separate
    /// question answered by [`PriorSpec::check_proven_range`].
    pub fn new(nu: f64, variant: RhoVariant, n: usize, d: usize) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidPrior(format!("nu = {nu} must be positive and finite")));
        }
        if n < 2 {
            return Err(Error::InvalidPrior(format!("n = {n} must be at least 2")));
        }
        if d == 0 {
            return Err(Error::InvalidPrior("d must be at least 1".into()));
        }
        match variant {
            RhoVariant::Kato => {
                let kato_nu = d as f64 / 2.0 - 1.0;
                if d < 3 || (nu - kato_nu).abs() > 1e-12 {
                    return Err(Error::InvalidPrior(format!(
                        "kato prior requires d >= 3 and nu = d/2 - 1 (d = {d}, nu = {nu})"
                    )));
                }
            }
            RhoVariant::MaruyamaStrawderman { b } if !(b > -1.0) || !b.is_finite() => {
                return Err(Error::InvalidPrior(format!("ms prior requires b > -1 (b = {b})")));
            }
            _ => {}
        }
        Ok(Self { nu, variant, n, d })
    }

    /// Kato's prior: ρ ≡ 1, a = −2, hence ν = d/2 − 1.
    pub fn kato(n: usize, d: usize) -> Result<Self> {
        Self::new(d as f64 / 2.0 - 1.0, RhoVariant::Kato, n, d)
    }

    /// a = ν − d/2 − 1.
    pub fn a(&self) -> f64 {
        self.nu - self.d as f64 / 2.0 - 1.0
    }

    /// Range of ν in which the prior is known to dominate the best
    /// equivariant density: 0 < ν < 1 for `LowDim`, 0 < ν ≤ d/2 − 1 with
    /// d ≥ 3 for the high-dimensional band.
    pub fn check_proven_range(&self) -> Result<()> {
        let half_d = self.d as f64 / 2.0;
        match self.variant {
            RhoVariant::LowDim if self.nu >= 1.0 => Err(Error::InvalidPrior(format!(
                "lowdim prior is covered for 0 < nu < 1 only (nu = {})",
                self.nu
            ))),
            RhoVariant::HighDimLower | RhoVariant::HighDimUpper if self.d < 3 || self.nu > half_d - 1.0 + 1e-12 => {
                Err(Error::InvalidPrior(format!(
                    "{} prior is covered for d >= 3 and nu <= d/2 - 1 (d = {}, nu = {})",
                    self.variant, self.d, self.nu
                )))
            }
            RhoVariant::MaruyamaStrawderman { .. } => Err(Error::InvalidPrior(
                "ms prior has no Kullback-Leibler domination guarantee".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Exponent β of the (1 − λ)^β behaviour of ρ at λ → 1.
    pub fn right_exponent(&self) -> f64 {
        match self.variant {
            RhoVariant::LowDim => (self.n - 1) as f64 * self.d as f64 / 2.0 - 1.0,
            RhoVariant::MaruyamaStrawderman { b } => b,
            _ => 0.0,
        }
    }

    /// log ρ(λ) given λ and 1 − λ separately (the complement is used for
    /// every (1 − cλ) factor so λ near 1 keeps full precision).
    pub(crate) fn log_rho_pair(&self, lambda: f64, one_minus_lambda: f64) -> f64 {
        let n = self.n as f64;
        let d = self.d as f64;
        let band_exp = d / 2.0 - self.nu - 1.0;
        match self.variant {
            RhoVariant::LowDim => {
                let e1 = (n - 1.0) * d / 2.0 - 1.0;
                let e2 = -((n - 2.0) * d / 2.0 + self.nu);
                let first = if e1 == 0.0 { 0.0 } else { e1 * one_minus_lambda.ln() };
                first + e2 * (one_minus_lambda + lambda / n).ln()
            }
            RhoVariant::HighDimLower => band_exp * (one_minus_lambda + lambda / (n + 1.0)).ln(),
            RhoVariant::HighDimUpper => band_exp * (one_minus_lambda + lambda / n).ln(),
            RhoVariant::Kato => 0.0,
            RhoVariant::MaruyamaStrawderman { b } => {
                if b == 0.0 {
                    0.0
                } else {
                    b * one_minus_lambda.ln()
                }
            }
        }
    }

    /// ρ(λ) for λ ∈ (0, 1).
    pub fn rho(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Domain {
                func: "rho_eval",
                detail: format!("lambda = {lambda} outside (0, 1)"),
            });
        }
        Ok(self.log_rho_pair(lambda, 1.0 - lambda).exp())
    }

    /// Lower and upper envelopes {1 − nλ/(n+1)}^{d/2−ν−1} and
    /// {1 − (n−1)λ/n}^{d/2−ν−1}, in log scale.
    pub(crate) fn log_band(&self, lambda: f64, one_minus_lambda: f64) -> (f64, f64) {
        let lower = PriorSpec {
            variant: RhoVariant::HighDimLower,
            ..*self
        };
        let upper = PriorSpec {
            variant: RhoVariant::HighDimUpper,
            ..*self
        };
        (
            lower.log_rho_pair(lambda, one_minus_lambda),
            upper.log_rho_pair(lambda, one_minus_lambda),
        )
    }
}

pub fn rho_eval(spec: &PriorSpec, lambda: f64) -> Result<f64> {
    spec.rho(lambda)
}

/// Outcome of checking ρ against the envelope band on a λ-grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub pass: bool,
    /// Largest excursion outside the band, lower/ρ − 1 below it and
    /// ρ/upper − 1 above it; ≤ 0 means inside.
    pub max_violation: f64,
    /// λ at which `max_violation` occurs.
    pub worst_lambda: f64,
    pub grid_points: usize,
}

pub const SANDWICH_GRID_POINTS: usize = 10_000;
/// Relative slack for rounding in the exponent d/2 − ν − 1.
pub const SANDWICH_TOLERANCE: f64 = 1e-14;

/// Evaluates the band inequality without the range preconditions.
pub fn sandwich_violation(spec: &PriorSpec, grid_points: usize) -> SandwichReport {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_lambda = f64::NAN;
    for i in 0..grid_points {
        let lambda = (i as f64 + 0.5) / grid_points as f64;
        let one_minus = 1.0 - lambda;
        let log_rho = spec.log_rho_pair(lambda, one_minus);
        let (log_lo, log_hi) = spec.log_band(lambda, one_minus);
        // exp(x) − 1 on the log gaps gives relative excursions.
        let below = (log_lo - log_rho).exp_m1();
        let above = (log_rho - log_hi).exp_m1();
        let v = below.max(above);
        if v > worst {
            worst = v;
            worst_lambda = lambda;
        }
    }
    SandwichReport {
        pass: worst <= SANDWICH_TOLERANCE,
        max_violation: worst,
        worst_lambda,
        grid_points,
    }
}

/// Checks {1 − nλ/(n+1)}^{d/2−ν−1} ≤ ρ(λ) ≤ {1 − (n−1)λ/n}^{d/2−ν−1} on a
/// dense grid; requires d ≥ 3 and 0 < ν ≤ d/2 − 1.
pub fn validate_sandwich(spec: &PriorSpec) -> Result<SandwichReport> {
    if spec.d < 3 || spec.nu > spec.d as f64 / 2.0 - 1.0 + 1e-12 {
        return Err(Error::InvalidPrior(format!(
            "sandwich check needs d >= 3 and 0 < nu <= d/2 - 1 (d = {}, nu = {})",
            spec.d, spec.nu
        )));
    }
    Ok(sandwich_violation(spec, SANDWICH_GRID_POINTS))
}
