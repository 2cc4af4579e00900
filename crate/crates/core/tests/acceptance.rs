//! Acceptance gate. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::Instant;

use predrisk::bounds::{nu_star, NU_STAR_DEFAULT_TOL};
use predrisk::checks::{
    lemma1_suite, lemma_bounds_suite, normalization_suite, sandwich_suite, theorem1_suite, SuiteReport, LEMMA1_CASES,
    LEMMA_BOUNDS_REPS, THEOREM1_CASES,
};
use predrisk::model::SufficientStats;
use predrisk::prior::{PriorSpec, RhoVariant};
use predrisk::risk::{kl_risk_diff_mc, with_threads, RiskEstimate};
use predrisk::specfun::{digamma, log_gamma, reg_inc_beta};

const SEED: u64 = 20_240_601;
const REPS: usize = 5000;
const TRIALS: usize = 10;
const XI_GRID: [f64; 5] = [0.0, 1.0, 10.0, 100.0, 1000.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite_outcome(reports: &[SuiteReport]) -> Outcome {
    let cases: usize = reports.iter().map(|r| r.cases.len()).sum();
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(|c| c.label.clone()))
        .collect();
    Outcome {
        pass: reports.iter().all(|r| r.pass),
        detail: if failures.is_empty() {
            format!("{cases} cases")
        } else {
            format!("{} of {cases} cases failed; first: {}", failures.len(), failures[0])
        },
    }
}

fn nu_star_table() -> Outcome {
    let table = [(1, 0.25), (2, 0.33), (3, 0.18), (4, 0.05)];
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_predrisk"))
        .arg("nustar")
        .output()
        .expect("run predrisk nustar");
    let elapsed = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<(usize, f64)> = stdout
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Some((f.first()?.parse().ok()?, f.get(2)?.parse().ok()?))
        })
        .collect();
    let mut pass = out.status.success() && rows.len() == table.len() && elapsed < 1.0;
    let mut detail = Vec::new();
    for ((d, want), row) in table.iter().zip(&rows) {
        let lib = nu_star(*d, 2, NU_STAR_DEFAULT_TOL)
            .map(|r| r.nu_star)
            .unwrap_or(f64::NAN);
        let ok = row.0 == *d && (row.1 - want).abs() <= 0.01 && row.1 == lib;
        pass &= ok;
        detail.push(format!("d={d}: {:.4} (table {want})", row.1));
    }
    Outcome {
        pass,
        detail: format!("{}; {elapsed:.3}s", detail.join(", ")),
    }
}

fn timed_suite(report: SuiteReport, elapsed: f64, limit: f64) -> Outcome {
    let mut o = suite_outcome(&[report]);
    o.pass &= elapsed < limit;
    o.detail = format!("{}; {elapsed:.1}s (limit {limit}s)", o.detail);
    o
}

fn risk_cell(spec: &PriorSpec, xi: f64) -> Result<RiskEstimate, String> {
    kl_risk_diff_mc(xi, spec, spec.n, spec.d, REPS, TRIALS, SEED).map_err(|e| e.to_string())
}

/// ≥ −2 se at every ξ and > 2 se at ξ = 0.
fn sign_structure(specs: &[PriorSpec]) -> Outcome {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    let mut worst_label = String::new();
    let mut notes = Vec::new();
    for spec in specs {
        for xi in XI_GRID {
            match risk_cell(spec, xi) {
                Ok(est) => {
                    let z = est.mean / est.std_error;
                    let ok = est.mean >= -2.0 * est.std_error && (xi > 0.0 || est.mean > 2.0 * est.std_error);
                    if z < worst {
                        worst = z;
                        worst_label = format!("{} nu={:.4} n={} d={} xi={xi}", spec.variant, spec.nu, spec.n, spec.d);
                    }
                    if !ok {
                        pass = false;
                        notes.push(format!(
                            "{} nu={:.4} n={} d={} xi={xi}: {:.3e} ± {:.1e}",
                            spec.variant, spec.nu, spec.n, spec.d, est.mean, est.std_error
                        ));
                    }
                }
                Err(e) => {
                    pass = false;
                    notes.push(e);
                }
            }
        }
    }
    let cells = specs.len() * XI_GRID.len();
    Outcome {
        pass,
        detail: if notes.is_empty() {
            format!("{cells} cells; smallest mean/se {worst:.2} at {worst_label}")
        } else {
            format!("{} of {cells} cells off: {}", notes.len(), notes.join("; "))
        },
    }
}

fn figure_sign_structure() -> Outcome {
    let mut specs = Vec::new();
    for d in 1..=3 {
        let star = nu_star(d, 2, NU_STAR_DEFAULT_TOL)
            .expect("nu* exists for d <= 4")
            .nu_star;
        for nu in [0.05, star] {
            specs.push(PriorSpec::new(nu, RhoVariant::LowDim, 2, d).expect("valid prior"));
        }
    }
    sign_structure(&specs)
}

fn high_dimension() -> Outcome {
    let mut specs = Vec::new();
    for d in [3, 5] {
        for n in [2, 3] {
            specs.push(PriorSpec::kato(n, d).expect("valid prior"));
            specs.push(PriorSpec::new(1.0, RhoVariant::HighDimUpper, n, d).expect("valid prior"));
        }
    }
    sign_structure(&specs)
}

fn envelope_consistency() -> Outcome {
    suite_outcome(&[sandwich_suite()])
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();

    let mut worst_gamma: f64 = 0.0;
    let mut worst_psi: f64 = 0.0;
    for i in 1..=400 {
        let x = i as f64 * 0.037;
        worst_gamma = worst_gamma.max(
            (log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln()).abs()
                / log_gamma(x + 1.0).unwrap().abs().max(1.0),
        );
        worst_psi = worst_psi.max((digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x).abs() * x.min(1.0));
    }
    if worst_gamma > 1e-13 || worst_psi > 1e-13 {
        failures.push(format!(
            "recurrences: lgamma {worst_gamma:.1e}, digamma {worst_psi:.1e}"
        ));
    }

    let mut worst_refl: f64 = 0.0;
    for &(a, b) in &[
        (0.05, 0.5),
        (0.5, 0.5),
        (1.0, 3.0),
        (2.5, 7.0),
        (30.0, 0.8),
        (0.18, 1.5),
    ] {
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let lhs = reg_inc_beta(u, a, b).unwrap();
            let rhs = 1.0 - reg_inc_beta(1.0 - u, b, a).unwrap();
            worst_refl = worst_refl.max((lhs - rhs).abs());
        }
    }
    if worst_refl > 1e-13 {
        failures.push(format!("incomplete-beta reflection {worst_refl:.1e}"));
    }

    let raw = [
        vec![0.3, -1.1, 2.0],
        vec![1.7, 0.2, -0.4],
        vec![-0.6, 0.9, 0.1],
        vec![2.2, -0.3, 0.8],
    ];
    let mut stats = SufficientStats::from_samples(&raw[..2]).unwrap();
    let mut worst_update: f64 = 0.0;
    for k in 2..raw.len() {
        stats = stats.update(&raw[k]).unwrap();
        let scratch = SufficientStats::from_samples(&raw[..=k]).unwrap();
        worst_update = worst_update.max((stats.s - scratch.s).abs());
        for (a, b) in stats.xbar.iter().zip(&scratch.xbar) {
            worst_update = worst_update.max((a - b).abs());
        }
    }
    if worst_update > 1e-13 {
        failures.push(format!("update vs scratch {worst_update:.1e}"));
    }

    let spec = PriorSpec::new(0.25, RhoVariant::LowDim, 2, 1).unwrap();
    let runs: Vec<RiskEstimate> = [1, 2, 3, 8]
        .iter()
        .map(|&t| with_threads(Some(t), || kl_risk_diff_mc(5.0, &spec, 2, 1, 500, 4, SEED).unwrap()).unwrap())
        .collect();
    if runs.windows(2).any(|w| w[0] != w[1]) {
        failures.push("estimates differ across thread counts".into());
    }

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "lgamma {worst_gamma:.1e}, digamma {worst_psi:.1e}, reflection {worst_refl:.1e}, update {worst_update:.1e}, threads 1/2/3/8 identical"
            )
        } else {
            failures.join("; ")
        },
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        (
            "nu* table for n = 2, d = 1..4 within 0.01, under 1 s",
            Box::new(nu_star_table),
        ),
        (
            "closed-form density vs (eta, lambda) oracle, 50 configurations, rel 1e-5",
            Box::new(|| {
                let t = Instant::now();
                let r = lemma1_suite(SEED, LEMMA1_CASES);
                timed_suite(r, t.elapsed().as_secs_f64(), 60.0)
            }),
        ),
        (
            "marginal ratio identity, 20 points, rel 1e-4",
            Box::new(|| {
                let t = Instant::now();
                let r = theorem1_suite(SEED, THEOREM1_CASES);
                timed_suite(r, t.elapsed().as_secs_f64(), 60.0)
            }),
        ),
        (
            "predictive densities integrate to 1 within 1e-4",
            Box::new(|| suite_outcome(&[normalization_suite(SEED)])),
        ),
        (
            "risk-difference sign structure, lowdim prior, nu <= nu*(d), d = 1..3",
            Box::new(figure_sign_structure),
        ),
        (
            "risk-difference sign structure, kato and highdim-upper nu = 1, d in {3, 5}, n in {2, 3}",
            Box::new(high_dimension),
        ),
        (
            "bound inequalities at nu*(d)/2, d = 1..4, xi in {0, 10, 100}",
            Box::new(|| suite_outcome(&[lemma_bounds_suite(SEED, LEMMA_BOUNDS_REPS)])),
        ),
        (
            "envelope band equality cases and d = n = 2 coincidence",
            Box::new(envelope_consistency),
        ),
        (
            "special functions, incomplete beta, statistic updates, thread determinism",
            Box::new(property_suites),
        ),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "acceptance {} {verdict}: {name} [{}] ({:.1}s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance summary: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
