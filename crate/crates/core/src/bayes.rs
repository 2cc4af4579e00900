//! Bayesian predictive density under the Gaussian-mixture prior.
//!
//! The closed form expresses the Bayes density as the best equivariant
//! density times
//!
//! ```text
//! c_B (s_{n+1}/s_n)^{−ν} J_{n+1}(w_{n+1}) / J_n(w_n),
//! c_B = (1 + 1/n)^ν B(ν, (n−1)d/2) / B(ν, nd/2),
//! J_l(w) = ∫₀¹ λ^{ν−1} {1+(l−1)λ}^{d/2−ν−1} (1+wλ)^{−(l−1)d/2−ν} ρ(lλ/(1+(l−1)λ)) dλ.
//! ```
//!
//! J_l is evaluated after the change of variables z = (1+w)λ/(1+wλ), which
//! absorbs the w-dependent peak of (1 + wλ)^{−k}:
//!
//! ```text
//! J_l(w) = (1+w)^{−ν} ∫₀¹ z^{ν−1} (1 − u z)^{(l−1)d/2−1} G(λ(z)) dz,   u = w/(1+w),
//! ```
//!
//! with G(λ) = {1+(l−1)λ}^{d/2−ν−1} ρ(λ'). The remaining z^{ν−1} singularity
//! is removed by t = z^ν (tanh-sinh and adaptive schemes) or carried by the
//! Gauss–Jacobi weight.
//!
//! The marginal ρ_π(z, v; l) = v·m_π(z, v; l) is computed on a separate path
//! by two-dimensional quadrature over (η, λ); it serves as the oracle for the
//! closed form.

use crate::error::{Error, Result};
use crate::model::{best_equivariant_logpdf, norm_sq, SufficientStats};
use crate::prior::PriorSpec;
use crate::quadrature::{integrate_adaptive, GaussJacobiRule, QuadratureConfig, Scheme, TanhSinhRule};
use crate::specfun::{log_beta_unchecked, log_gamma_unchecked};

const MAX_SUBDIVISIONS: usize = 10_000;

#[derive(Debug, Clone, Copy)]
struct ZNode {
    z: f64,
    one_minus_z: f64,
    /// Quadrature weight, already divided out by any analytic weight factor.
    weight: f64,
    /// log-weight correction subtracted from the integrand (Gauss–Jacobi only).
    log_correction: f64,
}

#[derive(Debug, Clone)]
enum Rule {
    Fixed(Vec<ZNode>),
    Adaptive { abs_tol: f64, rel_tol: f64 },
}

/// Evaluates log J_l(w) for a fixed prior and index l, reusing its node table
/// across calls.
#[derive(Debug, Clone)]
pub struct JIntegrator {
    spec: PriorSpec,
    l: usize,
    /// (l−1)d/2 − 1
    kernel_exp: f64,
    /// d/2 − ν − 1
    middle_exp: f64,
    right_exp: f64,
    rule: Rule,
}

impl JIntegrator {
    pub fn new(spec: &PriorSpec, l: usize, quad: &QuadratureConfig) -> Result<Self> {
        quad.validate()?;
        if l != spec.n && l != spec.n + 1 {
            return Err(Error::InvalidArgument(format!(
                "J_l needs l in {{n, n+1}} (l = {l}, n = {})",
                spec.n
            )));
        }
        let nu = spec.nu;
        let d = spec.d as f64;
        let right_exp = spec.right_exponent();
        let rule = match quad.scheme {
            Scheme::TanhSinh => {
                let rule = TanhSinhRule::new(quad.node_count);
                let nodes = rule
                    .nodes()
                    .iter()
                    .filter_map(|node| {
                        // t = z^ν, so z^{ν−1} dz = dt/ν.
                        let ln_t = if node.x < 0.5 {
                            node.x.ln()
                        } else {
                            (-node.one_minus_x).ln_1p()
                        };
                        let ln_z = ln_t / nu;
                        let one_minus_z = -ln_z.exp_m1();
                        (one_minus_z > 0.0).then(|| ZNode {
                            z: ln_z.exp(),
                            one_minus_z,
                            weight: node.weight / nu,
                            log_correction: 0.0,
                        })
                    })
                    .collect();
                Rule::Fixed(nodes)
            }
            Scheme::GaussJacobi => {
                let rule = GaussJacobiRule::new(quad.node_count, nu - 1.0, right_exp)?;
                let nodes = rule
                    .nodes()
                    .iter()
                    .filter(|node| node.x > 0.0 && node.one_minus_x > 0.0)
                    .map(|node| ZNode {
                        z: node.x,
                        one_minus_z: node.one_minus_x,
                        weight: node.weight,
                        log_correction: if right_exp == 0.0 {
                            0.0
                        } else {
                            right_exp * node.one_minus_x.ln()
                        },
                    })
                    .collect();
                Rule::Fixed(nodes)
            }
            Scheme::Adaptive => Rule::Adaptive {
                abs_tol: quad.abs_tol,
                rel_tol: quad.rel_tol,
            },
        };
        Ok(Self {
            spec: *spec,
            l,
            kernel_exp: (l - 1) as f64 * d / 2.0 - 1.0,
            middle_exp: d / 2.0 - nu - 1.0,
            right_exp,
            rule,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// log[(1 − uz)^{(l−1)d/2−1} G(λ(z))].
    #[inline]
    fn log_kernel(&self, z: f64, one_minus_z: f64, w: f64, ln_1p_w: f64) -> f64 {
        let stretched = 1.0 + w * one_minus_z; // (1 + w)(1 − uz)
        let ln_stretched = stretched.ln();
        let lambda = z / stretched;
        let one_minus_lambda = (1.0 + w) * one_minus_z / stretched;
        let q = 1.0 + (self.l - 1) as f64 * lambda;
        let lambda_p = self.l as f64 * lambda / q;
        let one_minus_lambda_p = one_minus_lambda / q;
        let mut out = self.spec.log_rho_pair(lambda_p, one_minus_lambda_p);
        if self.kernel_exp != 0.0 {
            out += self.kernel_exp * (ln_stretched - ln_1p_w);
        }
        if self.middle_exp != 0.0 {
            out += self.middle_exp * q.ln();
        }
        out
    }

    /// log J_l(w).
    pub fn log_j(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::Domain {
                func: "j_integral",
                detail: format!("w = {w} must be finite and nonnegative"),
            });
        }
        let ln_1p_w = w.ln_1p();
        let integral = match &self.rule {
            Rule::Fixed(nodes) => nodes
                .iter()
                .map(|n| n.weight * (self.log_kernel(n.z, n.one_minus_z, w, ln_1p_w) - n.log_correction).exp())
                .sum::<f64>(),
            Rule::Adaptive { abs_tol, rel_tol } => self.adaptive_integral(w, ln_1p_w, *abs_tol, *rel_tol)?,
        };
        if !(integral > 0.0) || !integral.is_finite() {
            return Err(Error::Domain {
                func: "j_integral",
                detail: format!("non-positive or non-finite integral {integral} at w = {w}"),
            });
        }
        Ok(integral.ln() - self.spec.nu * ln_1p_w)
    }

    /// ∫₀¹ exp(kernel) dt with z = t^{1/ν}; the right half uses
    /// 1 − t = s^{1/(β+1)} to remove a (1 − z)^β endpoint singularity.
    fn adaptive_integral(&self, w: f64, ln_1p_w: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
        let nu = self.spec.nu;
        let beta1 = self.right_exp + 1.0;
        let left = integrate_adaptive(
            |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let ln_z = t.ln() / nu;
                let one_minus_z = -ln_z.exp_m1();
                self.log_kernel(ln_z.exp(), one_minus_z, w, ln_1p_w).exp() / nu
            },
            0.0,
            0.5,
            abs_tol,
            rel_tol,
            MAX_SUBDIVISIONS,
        )?;
        let right = integrate_adaptive(
            |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let ln_r = s.ln() / beta1;
                let r = ln_r.exp();
                let ln_z = (-r).ln_1p() / nu;
                let one_minus_z = -ln_z.exp_m1();
                if one_minus_z <= 0.0 {
                    return 0.0;
                }
                (self.log_kernel(ln_z.exp(), one_minus_z, w, ln_1p_w) - self.right_exp * ln_r).exp() / (nu * beta1)
            },
            0.0,
            0.5f64.powf(beta1),
            abs_tol,
            rel_tol,
            MAX_SUBDIVISIONS,
        )?;
        Ok(left.value + right.value)
    }
}

/// J_l(w) for a single evaluation.
pub fn j_integral(l: usize, w: f64, spec: &PriorSpec, quad: &QuadratureConfig) -> Result<f64> {
    Ok(JIntegrator::new(spec, l, quad)?.log_j(w)?.exp())
}

/// log c_B with c_B = (1 + 1/n)^ν B(ν, (n−1)d/2) / B(ν, nd/2).
pub fn log_c_b(spec: &PriorSpec) -> f64 {
    let n = spec.n as f64;
    let d = spec.d as f64;
    spec.nu * (1.0 / n).ln_1p() + log_beta_unchecked(spec.nu, (n - 1.0) * d / 2.0)
        - log_beta_unchecked(spec.nu, n * d / 2.0)
}

/// Closed-form Bayes predictive density for one prior, with node tables for
/// both J_n and J_{n+1} prepared once.
#[derive(Debug, Clone)]
pub struct GmPredictive {
    spec: PriorSpec,
    j_n: JIntegrator,
    j_n1: JIntegrator,
    log_cb: f64,
}

impl GmPredictive {
    pub fn new(spec: &PriorSpec, quad: &QuadratureConfig) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            j_n: JIntegrator::new(spec, spec.n, quad)?,
            j_n1: JIntegrator::new(spec, spec.n + 1, quad)?,
            log_cb: log_c_b(spec),
        })
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    fn check_stats(&self, stats: &SufficientStats) -> Result<()> {
        if stats.count != self.spec.n {
            return Err(Error::InvalidArgument(format!(
                "statistics built from {} observations but the prior expects n = {}",
                stats.count, self.spec.n
            )));
        }
        if stats.dim() != self.spec.d {
            return Err(Error::DimensionMismatch {
                expected: self.spec.d,
                got: stats.dim(),
            });
        }
        if !(stats.s > 0.0) {
            return Err(Error::SingularStatistic);
        }
        Ok(())
    }

    /// log p̂_GM − log p̂_R given the statistics before and after absorbing y.
    pub fn log_ratio_from_stats(&self, before: &SufficientStats, after: &SufficientStats) -> Result<f64> {
        let log_j_n1 = self.j_n1.log_j(after.w())?;
        let log_j_n = self.j_n.log_j(before.w())?;
        Ok(self.log_cb - self.spec.nu * (after.s / before.s).ln() + log_j_n1 - log_j_n)
    }

    /// log p̂_GM(y | x̄, s) − log p̂_R(y | x̄, s).
    pub fn log_ratio(&self, y: &[f64], stats: &SufficientStats) -> Result<f64> {
        self.check_stats(stats)?;
        let after = stats.update(y)?;
        self.log_ratio_from_stats(stats, &after)
    }

    pub fn logpdf(&self, y: &[f64], stats: &SufficientStats) -> Result<f64> {
        Ok(self.log_ratio(y, stats)? + best_equivariant_logpdf(y, stats)?)
    }
}

/// log p̂_GM(y | x̄, s).
pub fn gm_predictive_logpdf(
    y: &[f64],
    stats: &SufficientStats,
    spec: &PriorSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    GmPredictive::new(spec, quad)?.logpdf(y, stats)
}

/// log ρ_π(z, v; l) = log[v · m_π(z, v; l)] by two-dimensional quadrature.
///
/// The μ-integral is Gaussian and done analytically, leaving
///
/// ```text
/// m_π = ∫₀¹ ∫₀^∞ φ(z; 0, c_λ/η) η γ_{(l−1)d}(ηv) η^a λ^a ρ(λ) dη dλ,   c_λ = 1/l + (1−λ)/λ,
/// ```
///
/// with γ_k the chi-square density with k degrees of freedom. Both remaining
/// integrals are evaluated numerically; the η-integral in the variable
/// x = ηv on a logarithmic grid.
///
/// The quadrature configuration only supplies tolerances here.
pub fn log_marginal_rho(z: &[f64], v: f64, l: usize, spec: &PriorSpec, quad: &QuadratureConfig) -> Result<f64> {
    if z.len() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            got: z.len(),
        });
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain {
            func: "marginal_rho",
            detail: format!("v = {v} must be positive"),
        });
    }
    if l < 2 {
        return Err(Error::InvalidArgument(format!("marginal_rho needs l >= 2 (l = {l})")));
    }
    let d = spec.d as f64;
    let lf = l as f64;
    let nu = spec.nu;
    let a = spec.a();
    let dof = (l - 1) as f64 * d;
    let alpha = dof / 2.0 + nu;
    let z2 = norm_sq(z);
    let outer_tol = quad.rel_tol.max(1e-12);
    let inner_tol = (outer_tol * 0.1).max(1e-13);

    // E(r) = ∫₀^∞ x^{α−1} exp(−x(1 + r)/2) dx with x = e^y.
    let eta_integral = |r: f64| -> Result<f64> {
        let peak = (2.0 * alpha / (1.0 + r)).ln();
        let lo = peak - 40.0 / alpha - 2.0;
        let hi = peak + 5.0;
        let half = 0.5 * (1.0 + r);
        let out = integrate_adaptive(
            |y: f64| (alpha * y - y.exp() * half).exp(),
            lo,
            hi,
            1e-300,
            inner_tol,
            MAX_SUBDIVISIONS,
        )?;
        Ok(out.value)
    };

    // log of λ^a ρ(λ) c_λ^{−d/2} E(r(λ)) without the λ^{ν−1} factor, which the
    // caller's substitution carries.
    let log_outer = |ln_lambda: f64, lambda: f64, one_minus_lambda: f64| -> Result<f64> {
        // c_λ = (l − (l−1)λ)/(lλ) = (1 + (l−1)(1−λ))/(lλ)
        let c_num = 1.0 + (lf - 1.0) * one_minus_lambda;
        let ln_c = c_num.ln() - lf.ln() - ln_lambda;
        let r = z2 * (lf * lambda / c_num) / v;
        let e = eta_integral(r)?;
        Ok((a + 1.0 - nu) * ln_lambda + spec.log_rho_pair(lambda, one_minus_lambda) - 0.5 * d * ln_c + e.ln())
    };

    let mut failure: Option<Error> = None;
    let left = integrate_adaptive(
        |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let ln_lambda = t.ln() / nu;
            let lambda = ln_lambda.exp();
            match log_outer(ln_lambda, lambda, -ln_lambda.exp_m1()) {
                Ok(v) => v.exp() / nu,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        0.5f64.powf(nu),
        1e-300,
        outer_tol,
        MAX_SUBDIVISIONS,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let left = left?;

    let beta1 = spec.right_exponent() + 1.0;
    let right = integrate_adaptive(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let ln_r = s.ln() / beta1;
            let one_minus_lambda = ln_r.exp();
            let lambda = 1.0 - one_minus_lambda;
            let ln_lambda = (-one_minus_lambda).ln_1p();
            // λ^{ν−1} is smooth on [1/2, 1); restore it explicitly.
            match log_outer(ln_lambda, lambda, one_minus_lambda) {
                Ok(v) => (v + (nu - 1.0) * ln_lambda - (beta1 - 1.0) * ln_r).exp() / beta1,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        0.5f64.powf(beta1),
        1e-300,
        outer_tol,
        MAX_SUBDIVISIONS,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let right = right?;

    let ln_consts = -nu * v.ln()
        - 0.5 * d * (2.0 * std::f64::consts::PI).ln()
        - 0.5 * dof * 2f64.ln()
        - log_gamma_unchecked(dof / 2.0);
    Ok(ln_consts + (left.value + right.value).ln())
}

/// ρ_π(z, v; l) = v · m_π(z, v; l).
pub fn marginal_rho(z: &[f64], v: f64, l: usize, spec: &PriorSpec, quad: &QuadratureConfig) -> Result<f64> {
    Ok(log_marginal_rho(z, v, l, spec, quad)?.exp())
}

/// Bayes predictive density through the marginal ratio
/// ρ_π(x̄_{n+1}, s_{n+1}; n+1) / ρ_π(x̄_n, s_n; n) times p̂_R. Limited to d ≤ 2.
pub fn brute_force_predictive_logpdf(
    y: &[f64],
    stats: &SufficientStats,
    spec: &PriorSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if spec.d > 2 {
        return Err(Error::CostGuard(format!(
            "brute-force predictive density is limited to d <= 2 (d = {})",
            spec.d
        )));
    }
    if stats.count != spec.n {
        return Err(Error::InvalidArgument(format!(
            "statistics built from {} observations but the prior expects n = {}",
            stats.count, spec.n
        )));
    }
    let after = stats.update(y)?;
    let log_eq = best_equivariant_logpdf(y, stats)?;
    let num = log_marginal_rho(&after.xbar, after.s, spec.n + 1, spec, quad)?;
    let den = log_marginal_rho(&stats.xbar, stats.s, spec.n, spec, quad)?;
    Ok(num - den + log_eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::RhoVariant;

    fn adaptive() -> QuadratureConfig {
        QuadratureConfig::adaptive(1e-12)
    }

    #[test]
    fn kato_d4_closed_form() {
        // ν = 1, middle exponent 0: J = ∫₀¹(1+wλ)^{−3} dλ = [1 − (1+w)^{−2}]/(2w).
        let spec = PriorSpec::kato(2, 4).unwrap();
        for quad in [
            adaptive(),
            QuadratureConfig::default(),
            QuadratureConfig::fixed(Scheme::GaussJacobi, 64),
        ] {
            let j = j_integral(2, 1.0, &spec, &quad).unwrap();
            assert!((j - 0.375).abs() < 1e-10, "{quad:?}: {j}");
        }
    }

    #[test]
    fn power_rule_at_w_zero() {
        // w = 0, ρ ≡ 1 and d/2 − ν − 1 = 0 leave ∫₀¹ λ^{ν−1} dλ = 1/ν.
        for d in [3, 5, 8] {
            let spec = PriorSpec::kato(3, d).unwrap();
            for l in [3, 4] {
                let j = j_integral(l, 0.0, &spec, &QuadratureConfig::default()).unwrap();
                assert!((j * spec.nu - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lowdim_j_n_closed_form() {
        // For l = n the LowDim integrand collapses to a Beta kernel:
        // J_n(w) = B(ν, (n−1)d/2) (1 + w)^{−ν}.
        for (n, d, nu) in [(2, 1, 0.05), (2, 3, 0.18), (3, 2, 0.7), (4, 5, 1.9)] {
            let spec = PriorSpec::new(nu, RhoVariant::LowDim, n, d).unwrap();
            let m = (n - 1) as f64 * d as f64 / 2.0;
            for w in [0.0, 0.3, 7.0, 1e3, 1e7] {
                let want = log_beta_unchecked(nu, m) - nu * f64::ln_1p(w);
                for quad in [adaptive(), QuadratureConfig::default()] {
                    let got = JIntegrator::new(&spec, n, &quad).unwrap().log_j(w).unwrap();
                    assert!(
                        (got - want).abs() < 1e-9,
                        "n={n} d={d} nu={nu} w={w} {quad:?}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_nu_matches_adaptive() {
        for variant in [RhoVariant::LowDim, RhoVariant::MaruyamaStrawderman { b: -0.5 }] {
            let spec = PriorSpec::new(0.05, variant, 2, 1).unwrap();
            for w in [0.0, 0.5, 40.0, 2e4] {
                let exact = JIntegrator::new(&spec, 3, &adaptive()).unwrap().log_j(w).unwrap();
                let fixed = JIntegrator::new(&spec, 3, &QuadratureConfig::default())
                    .unwrap()
                    .log_j(w)
                    .unwrap();
                assert!(
                    ((fixed - exact).exp_m1()).abs() < 1e-6,
                    "{variant} w={w}: {fixed} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn j_decreasing_in_w() {
        let specs = [
            PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap(),
            PriorSpec::kato(3, 5).unwrap(),
            PriorSpec::new(1.0, RhoVariant::HighDimLower, 2, 6).unwrap(),
        ];
        for spec in specs {
            let jr = JIntegrator::new(&spec, spec.n + 1, &QuadratureConfig::default()).unwrap();
            let mut prev = f64::INFINITY;
            let mut w = 0.0;
            while w < 1e4 {
                let v = jr.log_j(w).unwrap();
                assert!(v < prev, "{spec:?} not decreasing at w = {w}");
                prev = v;
                w = 2.0 * w + 0.01;
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
        assert!(JIntegrator::new(&spec, 4, &QuadratureConfig::default()).is_err());
        let jr = JIntegrator::new(&spec, 2, &QuadratureConfig::default()).unwrap();
        assert!(jr.log_j(-1.0).is_err());
        assert!(jr.log_j(f64::NAN).is_err());
        let wrong_count = SufficientStats::new(vec![0.0], 1.0, 3).unwrap();
        assert!(gm_predictive_logpdf(&[0.0], &wrong_count, &spec, &QuadratureConfig::default()).is_err());
        let spec3 = PriorSpec::kato(2, 3).unwrap();
        let st3 = SufficientStats::new(vec![0.0; 3], 1.0, 2).unwrap();
        assert!(matches!(
            brute_force_predictive_logpdf(&[0.0; 3], &st3, &spec3, &adaptive()),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn oracle_agreement_at_reference_point() {
        let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
        let stats = SufficientStats::new(vec![1.1], 0.9, 2).unwrap();
        let closed = gm_predictive_logpdf(&[0.3], &stats, &spec, &adaptive()).unwrap();
        let brute = brute_force_predictive_logpdf(&[0.3], &stats, &spec, &adaptive()).unwrap();
        assert!(
            (closed - brute).abs() <= 1e-5 * closed.abs() + 1e-8,
            "{closed} vs {brute}"
        );
    }

    #[test]
    fn brute_force_sign_symmetry() {
        let spec = PriorSpec::new(0.33, RhoVariant::LowDim, 2, 2).unwrap();
        let a = brute_force_predictive_logpdf(
            &[0.4, -0.7],
            &SufficientStats::new(vec![1.2, 0.3], 0.8, 2).unwrap(),
            &spec,
            &adaptive(),
        )
        .unwrap();
        let b = brute_force_predictive_logpdf(
            &[-0.4, 0.7],
            &SufficientStats::new(vec![-1.2, -0.3], 0.8, 2).unwrap(),
            &spec,
            &adaptive(),
        )
        .unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn marginal_rho_positive_and_homogeneous() {
        let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
        let r = marginal_rho(&[0.0], 1.0, 2, &spec, &adaptive()).unwrap();
        assert!(r.is_finite() && r > 0.0);
        // ρ_π(cz, c²v; l) = c^{−2ν} ρ_π(z, v; l)
        let base = log_marginal_rho(&[0.8], 1.3, 3, &spec, &adaptive()).unwrap();
        let scaled = log_marginal_rho(&[0.8 * 2f64.sqrt()], 2.6, 3, &spec, &adaptive()).unwrap();
        assert!(((scaled - base) - (-spec.nu * 2f64.ln())).abs() < 1e-6 * base.abs().max(1.0));
    }

    #[test]
    fn far_field_ratio_settles() {
        // |log p̂_GM − log p̂_R| shrinks along a ray x̄ = t·e₁ at fixed s, y = x̄.
        let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
        let gm = GmPredictive::new(&spec, &QuadratureConfig::default()).unwrap();
        let mut prev = f64::INFINITY;
        for t in [1.0, 3.0, 10.0, 30.0, 100.0, 1e3] {
            let stats = SufficientStats::new(vec![t], 1.0, 2).unwrap();
            let r = gm.log_ratio(&[t], &stats).unwrap().abs();
            assert!(r < prev, "t = {t}: {r} >= {prev}");
            prev = r;
        }
        assert!(prev.is_finite());
    }
}
