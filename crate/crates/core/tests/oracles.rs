use predrisk::bayes::{brute_force_predictive_logpdf, log_marginal_rho, GmPredictive, JIntegrator};
use predrisk::checks::{integrate_density_1d, integrate_density_is, lemma1_suite, theorem1_suite};
use predrisk::model::{best_equivariant_logpdf, SufficientStats};
use predrisk::prior::{PriorSpec, RhoVariant};
use predrisk::quadrature::{QuadratureConfig, Scheme};

fn sweep_specs() -> Vec<PriorSpec> {
    [
        (0.05, RhoVariant::LowDim, 2, 1),
        (0.25, RhoVariant::LowDim, 2, 1),
        (0.33, RhoVariant::LowDim, 2, 2),
        (0.18, RhoVariant::LowDim, 2, 3),
        (0.025, RhoVariant::LowDim, 2, 4),
        (2.0, RhoVariant::LowDim, 2, 1),
        (1.75, RhoVariant::LowDim, 3, 3),
        (0.5, RhoVariant::Kato, 3, 3),
        (1.5, RhoVariant::Kato, 2, 5),
        (1.0, RhoVariant::HighDimUpper, 3, 5),
        (1.0, RhoVariant::HighDimUpper, 2, 3),
        (0.05, RhoVariant::HighDimLower, 2, 3),
        (0.5, RhoVariant::MaruyamaStrawderman { b: -0.5 }, 2, 2),
        (0.9, RhoVariant::MaruyamaStrawderman { b: 2.0 }, 4, 1),
    ]
    .into_iter()
    .map(|(nu, v, n, d)| PriorSpec::new(nu, v, n, d).unwrap())
    .collect()
}

#[test]
fn fixed_rules_track_adaptive_reference() {
    for spec in sweep_specs() {
        for l in [spec.n, spec.n + 1] {
            let reference = JIntegrator::new(&spec, l, &QuadratureConfig::adaptive(1e-13)).unwrap();
            let tanh = JIntegrator::new(&spec, l, &QuadratureConfig::default()).unwrap();
            let jacobi = JIntegrator::new(&spec, l, &QuadratureConfig::fixed(Scheme::GaussJacobi, 128)).unwrap();
            let mut w = 0.0;
            while w < 1e9 {
                let want = reference.log_j(w).unwrap();
                let t = tanh.log_j(w).unwrap();
                let g = jacobi.log_j(w).unwrap();
                assert!(
                    (t - want).abs() < 1e-11,
                    "{spec:?} l={l} w={w}: tanh-sinh {t} vs {want}"
                );
                assert!(
                    (g - want).abs() < 1e-4,
                    "{spec:?} l={l} w={w}: gauss-jacobi {g} vs {want}"
                );
                w = 1.7 * w + 1e-3;
            }
        }
    }
}

#[test]
fn closed_form_matches_oracle_across_seeds() {
    for seed in [7, 99] {
        let r = lemma1_suite(seed, 50);
        assert!(r.pass, "{r}");
        let r = theorem1_suite(seed, 20);
        assert!(r.pass, "{r}");
    }
}

#[test]
fn brute_force_density_normalizes() {
    let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
    let stats = SufficientStats::new(vec![0.7], 1.3, 2).unwrap();
    let quad = QuadratureConfig::adaptive(1e-8);
    let mass = integrate_density_1d(&stats, |y| brute_force_predictive_logpdf(&[y], &stats, &spec, &quad)).unwrap();
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
}

#[test]
fn closed_form_normalizes_for_other_priors() {
    let quad = QuadratureConfig::default();
    for (nu, variant, n) in [
        (0.6, RhoVariant::MaruyamaStrawderman { b: 0.0 }, 2),
        (1.5, RhoVariant::LowDim, 3),
        (0.05, RhoVariant::LowDim, 4),
    ] {
        let spec = PriorSpec::new(nu, variant, n, 1).unwrap();
        let stats = SufficientStats::new(vec![-1.4], 0.6, n).unwrap();
        let gm = GmPredictive::new(&spec, &quad).unwrap();
        let mass = integrate_density_1d(&stats, |y| gm.logpdf(&[y], &stats)).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "{variant} nu={nu}: {mass}");
    }

    // d = 3 by importance sampling from the Student-t reference density.
    let spec = PriorSpec::kato(2, 3).unwrap();
    let stats = SufficientStats::new(vec![0.2, -0.4, 1.0], 1.5, 2).unwrap();
    let gm = GmPredictive::new(&spec, &quad).unwrap();
    let (mean, se) = integrate_density_is(&stats, |y| gm.logpdf(y, &stats), 20_000, 5).unwrap();
    assert!((mean - 1.0).abs() <= 3.0 * se, "{mean} ± {se}");

    // The reference density against itself has unit weights.
    let (mean, se) = integrate_density_is(&stats, |y| best_equivariant_logpdf(y, &stats), 100, 5).unwrap();
    assert!((mean - 1.0).abs() < 1e-12 && se < 1e-12);
}

#[test]
fn marginal_is_homogeneous() {
    // ρ_π(cz, c²v; l) = c^{−2ν} ρ_π(z, v; l)
    let quad = QuadratureConfig::adaptive(1e-11);
    for (nu, variant, d) in [
        (0.25, RhoVariant::LowDim, 1),
        (0.33, RhoVariant::LowDim, 2),
        (0.7, RhoVariant::MaruyamaStrawderman { b: 0.5 }, 2),
    ] {
        let spec = PriorSpec::new(nu, variant, 2, d).unwrap();
        let z: Vec<f64> = (0..d).map(|i| 0.6 - 0.9 * i as f64).collect();
        for l in [2, 3] {
            for c in [0.5f64, 2f64.sqrt(), 3.0] {
                let base = log_marginal_rho(&z, 1.3, l, &spec, &quad).unwrap();
                let cz: Vec<f64> = z.iter().map(|x| c * x).collect();
                let scaled = log_marginal_rho(&cz, 1.3 * c * c, l, &spec, &quad).unwrap();
                let want = -2.0 * nu * c.ln();
                assert!(((scaled - base) - want).abs() < 1e-6, "{variant} l={l} c={c}");
            }
        }
    }
}

#[test]
fn shrinkage_fades_along_a_ray() {
    let spec = PriorSpec::new(0.33, RhoVariant::LowDim, 2, 2).unwrap();
    let gm = GmPredictive::new(&spec, &QuadratureConfig::default()).unwrap();
    let mut prev = f64::INFINITY;
    for t in [0.5, 2.0, 8.0, 32.0, 128.0, 1024.0] {
        let stats = SufficientStats::new(vec![0.6 * t, 0.8 * t], 1.0, 2).unwrap();
        let r = gm.log_ratio(&[0.6 * t, 0.8 * t], &stats).unwrap().abs();
        assert!(r < prev, "t = {t}");
        prev = r;
    }
    assert!(prev < 1e-3);
}
