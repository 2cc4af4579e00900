//! Bound functions g and h, the domination threshold ν*, and Monte Carlo
//! checks of the two inequalities that combine into
//! risk difference ≥ ν E(1 − u_{n+1}) {g(n, d, ν) − h(n, d)}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::JIntegrator;
use crate::error::{domain, Error, Result};
use crate::model::{ModelConfig, SufficientStats};
use crate::prior::{PriorSpec, RhoVariant};
use crate::quadrature::QuadratureConfig;
use crate::sampling::{sample_noncentral_beta_u, sample_triplet, RngState};
use crate::specfun::{digamma, log_beta};

pub const NU_STAR_SCAN_START: f64 = 1e-6;
pub const NU_STAR_SCAN_STEP: f64 = 1e-3;
pub const NU_STAR_DEFAULT_TOL: f64 = 1e-6;

/// g(n, d, ν), defined piecewise in d ≤ n and d ≥ n + 1.
pub fn g_fn(n: usize, d: usize, nu: f64) -> Result<f64> {
    if n < 2 || d == 0 {
        return Err(domain("g_fn", format!("need n >= 2 and d >= 1 (n = {n}, d = {d})")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(domain("g_fn", format!("nu = {nu} outside (0, 1)")));
    }
    let nf = n as f64;
    let df = d as f64;
    if d <= n {
        let b = nf * df / 2.0 - (df - nu) / nf;
        if !(b > 0.0) {
            return Err(domain("g_fn", format!("beta argument {b} is not positive")));
        }
        Ok((log_beta(nu, b)? - log_beta(nu, nf * df / 2.0)?) / nu)
    } else {
        Ok((df - nu) / (nf * nu * (nf * df / 2.0 - 1.0)) * nu.ln_1p())
    }
}

/// h(n, d) = {1 + (n+1)d/2}/(nd/2) · [ψ{1 + (n+1)d/2} − ψ(1 + nd/2)].
pub fn h_fn(n: usize, d: usize) -> Result<f64> {
    if n < 2 || d == 0 {
        return Err(domain("h_fn", format!("need n >= 2 and d >= 1 (n = {n}, d = {d})")));
    }
    let big = 1.0 + (n + 1) as f64 * d as f64 / 2.0;
    let small = 1.0 + n as f64 * d as f64 / 2.0;
    Ok(big / (small - 1.0) * (digamma(big)? - digamma(small)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuStar {
    pub d: usize,
    pub n: usize,
    pub nu_star: f64,
    /// Final bisection bracket: g − h ≥ 0 at the left end, < 0 at the right.
    pub bracket: (f64, f64),
    pub tol: f64,
}

/// First down-crossing of g(n, d, ·) − h(n, d) scanning ν upward from 1e−6
/// in steps of 1e−3, refined by bisection to `tol`.
///
/// The scan itself is valid for any d; the threshold is only known to exist
/// for n = 2 and d ≤ 4, and larger d may report [`Error::NoRoot`].
pub fn nu_star(d: usize, n: usize, tol: f64) -> Result<NuStar> {
    if n != 2 {
        return Err(Error::InvalidArgument(format!(
            "nu_star is defined for n = 2 only (n = {n})"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("nu_star needs d >= 1".into()));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("tol = {tol} must be positive")));
    }
    let h = h_fn(n, d)?;
    let f = |nu: f64| g_fn(n, d, nu).map(|g| g - h);

    let mut lo = NU_STAR_SCAN_START;
    if f(lo)? < 0.0 {
        return Err(Error::NoRoot { d, n });
    }
    let mut hi = None;
    let mut k = 1usize;
    loop {
        let nu = NU_STAR_SCAN_START + k as f64 * NU_STAR_SCAN_STEP;
        if nu >= 1.0 {
            break;
        }
        if f(nu)? < 0.0 {
            hi = Some(nu);
            break;
        }
        lo = nu;
        k += 1;
    }
    let mut hi = hi.ok_or(Error::NoRoot { d, n })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NuStar {
        d,
        n,
        nu_star: lo,
        bracket: (lo, hi),
        tol,
    })
}

/// One side of a bound check: per-replicate differences D = lhs − rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs_estimate: f64,
    pub rhs_bound: f64,
    /// Standard error of mean(lhs − rhs).
    pub se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaBoundsReport {
    pub d: usize,
    pub n: usize,
    pub nu: f64,
    pub xi: f64,
    pub reps: usize,
    pub seed: u64,
    /// E[log{B(ν,(n−1)d/2)/B(ν,nd/2) · J_{n+1}/J_n · (1−u_n)^ν/(1−u_{n+1})^ν}] ≥ ν g E(1 − u_{n+1}).
    pub g_bound: BoundCheck,
    /// E[log{(n+1)/n · s_n/s_{n+1} · (1−u_{n+1})/(1−u_n)}] ≥ −h E(1 − u_{n+1}).
    pub h_bound: BoundCheck,
    /// E(1 − u_{n+1}) under the sampling model.
    pub mean_one_minus_u: f64,
    /// E(1 − u) for u = χ²_d(nξ)/{χ²_d(nξ) + χ²_{nd}}.
    pub mean_one_minus_u_beta: f64,
    pub g: f64,
    pub h: f64,
}

fn summarize(diffs: &[f64], lhs: &[f64]) -> (f64, f64, f64) {
    let n = diffs.len() as f64;
    let mean_d = diffs.iter().sum::<f64>() / n;
    let mean_l = lhs.iter().sum::<f64>() / n;
    let se = if diffs.len() > 1 {
        (diffs.iter().map(|x| (x - mean_d).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    (mean_l, mean_d, se)
}

fn bound_check(lhs: &[f64], rhs: &[f64]) -> BoundCheck {
    let diffs: Vec<f64> = lhs.iter().zip(rhs).map(|(l, r)| l - r).collect();
    let (mean_l, mean_d, se) = summarize(&diffs, lhs);
    BoundCheck {
        lhs_estimate: mean_l,
        rhs_bound: mean_l - mean_d,
        se,
        pass: mean_d >= -3.0 * se,
    }
}

/// Monte Carlo check of both bound inequalities for the `LowDim` prior.
///
/// The left-hand sides depend jointly on (x̄, s, y), so every replicate draws
/// a full triplet with μ = √ξ e₁ and σ² = 1; the right-hand sides use
/// 1 − u_{n+1} from the same draws. Replicate k uses stream k of `seed`.
pub fn verify_lemma_bounds(
    d: usize,
    n: usize,
    nu: f64,
    xi: f64,
    spec: &PriorSpec,
    reps: usize,
    seed: u64,
) -> Result<LemmaBoundsReport> {
    if spec.variant != RhoVariant::LowDim || spec.d != d || spec.n != n || spec.nu != nu {
        return Err(Error::InvalidArgument(
            "verify_lemma_bounds needs a lowdim prior matching (d, n, nu)".into(),
        ));
    }
    if reps < 2 {
        return Err(Error::InvalidArgument(format!("reps = {reps} must be at least 2")));
    }
    spec.check_proven_range()?;
    let g = g_fn(n, d, nu)?;
    let h = h_fn(n, d)?;
    let quad = QuadratureConfig::default();
    let j_n = JIntegrator::new(spec, n, &quad)?;
    let j_n1 = JIntegrator::new(spec, n + 1, &quad)?;
    let nf = n as f64;
    let df = d as f64;
    let log_beta_ratio = log_beta(nu, (nf - 1.0) * df / 2.0)? - log_beta(nu, nf * df / 2.0)?;
    let model = ModelConfig::from_xi(n, d, xi)?;

    struct Draw {
        g_lhs: f64,
        h_lhs: f64,
        omu1: f64,
        omu_beta: f64,
    }

    let draws: Vec<Draw> = (0..reps as u64)
        .into_par_iter()
        .map(|k| -> Result<Draw> {
            let mut rng = RngState::new(seed, k).rng();
            let t = sample_triplet(&mut rng, &model)?;
            let before = SufficientStats::new(t.xbar, t.s, n)?;
            let after = before.update(&t.y)?;
            let omu_n = before.one_minus_u();
            let omu_n1 = after.one_minus_u();
            let g_lhs =
                log_beta_ratio + j_n1.log_j(after.w())? - j_n.log_j(before.w())? + nu * (omu_n.ln() - omu_n1.ln());
            let h_lhs = ((nf + 1.0) / nf).ln() + (before.s / after.s).ln() + omu_n1.ln() - omu_n.ln();
            let u = sample_noncentral_beta_u(&mut rng, d, n + 1, xi, n)?;
            if !(g_lhs.is_finite() && h_lhs.is_finite()) {
                return Err(Error::NonFinite {
                    stream_id: k,
                    detail: format!("bound terms g = {g_lhs}, h = {h_lhs}"),
                });
            }
            Ok(Draw {
                g_lhs,
                h_lhs,
                omu1: omu_n1,
                omu_beta: 1.0 - u,
            })
        })
        .collect::<Result<_>>()?;

    let g_lhs: Vec<f64> = draws.iter().map(|x| x.g_lhs).collect();
    let h_lhs: Vec<f64> = draws.iter().map(|x| x.h_lhs).collect();
    let g_rhs: Vec<f64> = draws.iter().map(|x| nu * g * x.omu1).collect();
    let h_rhs: Vec<f64> = draws.iter().map(|x| -h * x.omu1).collect();
    let count = reps as f64;
    Ok(LemmaBoundsReport {
        d,
        n,
        nu,
        xi,
        reps,
        seed,
        g_bound: bound_check(&g_lhs, &g_rhs),
        h_bound: bound_check(&h_lhs, &h_rhs),
        mean_one_minus_u: draws.iter().map(|x| x.omu1).sum::<f64>() / count,
        mean_one_minus_u_beta: draws.iter().map(|x| x.omu_beta).sum::<f64>() / count,
        g,
        h,
    })
}

impl LemmaBoundsReport {
    pub fn pass(&self) -> bool {
        self.g_bound.pass && self.h_bound.pass
    }
}
