//! Command-line front end.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or invalid input,
//! 3 computation incomplete, 4 partial grid failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bayes::GmPredictive;
use crate::bounds::{nu_star, NU_STAR_DEFAULT_TOL};
use crate::checks::{run_suite, Suite};
use crate::error::Error;
use crate::model::{best_equivariant_logpdf, plug_in_logpdf, SufficientStats};
use crate::prior::{PriorSpec, RhoVariant};
use crate::quadrature::QuadratureConfig;
use crate::risk::{default_nu_values, default_xi_values, run_grid, with_threads, ExperimentGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;
pub const EXIT_PARTIAL_GRID: i32 = 4;

pub const CSV_HEADER: &str = "xi,nu,d,n,prior,riskdiff_mean,riskdiff_se,reps,trials,seed";

#[derive(Debug, Parser)]
#[command(
    name = "predrisk",
    version,
    about = "Predictive densities and Kullback-Leibler risk differences"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo runs; output does not depend on it.
    #[arg(long, global = true, env = "PREDRISK_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Domination thresholds nu* as CSV rows `d,n,nu_star`.
    Nustar(NustarArgs),
    /// Monte Carlo risk-difference surface over a (xi, nu) grid.
    RiskSurface(RiskSurfaceArgs),
    /// One predictive density evaluation as JSON.
    Density(DensityArgs),
    /// Run an oracle or property suite.
    Check(CheckArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NustarArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d_min: usize,
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,
    #[arg(long, default_value_t = NU_STAR_DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RiskSurfaceArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// lowdim | highdim-lower | highdim-upper | kato | ms:<b>
    #[arg(long, value_parser = parse_variant)]
    pub prior: RhoVariant,
    /// Comma-separated nu values.
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<f64>>,
    /// `a:b:k` for k evenly spaced points from a to b, or a comma list.
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long, default_value_t = crate::risk::DEFAULT_REPLICATES)]
    pub reps: usize,
    #[arg(long, default_value_t = crate::risk::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMode {
    Plugin,
    Equivariant,
    Gm,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub mode: DensityMode,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xbar: Vec<f64>,
    #[arg(long)]
    pub s: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Vec<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, value_parser = parse_variant, default_value = "lowdim")]
    pub prior: RhoVariant,
    /// Plug-in variance; defaults to s/((n-1)d).
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_parser = parse_suite, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_variant(s: &str) -> Result<RhoVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `a:b:k` or a comma-separated list.
pub fn parse_xi_spec(spec: &str) -> Result<Vec<f64>, String> {
    let bad = |what: &str| format!("invalid --xi '{spec}': {what}");
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, k] => {
            let a: f64 = a.trim().parse().map_err(|_| bad("start is not a number"))?;
            let b: f64 = b.trim().parse().map_err(|_| bad("end is not a number"))?;
            let k: usize = k.trim().parse().map_err(|_| bad("count is not an integer"))?;
            match k {
                0 => return Err(bad("count must be at least 1")),
                1 => vec![a],
                _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
            }
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad("list entry is not a number")))
            .collect::<Result<_, _>>()?,
        _ => return Err(bad("expected a:b:k or a comma list")),
    };
    if values.iter().any(|x: &f64| !(*x >= 0.0) || !x.is_finite()) {
        return Err(bad("values must be finite and nonnegative"));
    }
    Ok(values)
}

/// Reproducibility record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_manifest(
    out: &Path,
    command: &str,
    parameters: Value,
    seed: Option<u64>,
    started: SystemTime,
    clock: Instant,
) -> std::io::Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_seconds: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    };
    let body = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    fs::write(manifest_path(out), body + "\n")
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::QuadratureNonConvergence { .. } | Error::NoRoot { .. } | Error::NonFinite { .. } => EXIT_INCOMPLETE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = cli.threads;
    let command = cli.command;
    match with_threads(threads, move || dispatch(command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Nustar(a) => cmd_nustar(&a),
        Command::RiskSurface(a) => cmd_risk_surface(&a),
        Command::Density(a) => cmd_density(&a),
        Command::Check(a) => cmd_check(&a),
    }
}

pub fn cmd_nustar(args: &NustarArgs) -> i32 {
    let started = SystemTime::now();
    let clock = Instant::now();
    if args.n != 2 {
        eprintln!("error: nu* is defined for n = 2 only (got --n {})", args.n);
        return EXIT_USAGE;
    }
    if args.d_min == 0 || args.d_min > args.d_max {
        eprintln!("error: need 1 <= --d-min <= --d-max");
        return EXIT_USAGE;
    }
    if !(args.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return EXIT_USAGE;
    }
    let mut body = String::from("d,n,nu_star\n");
    let mut code = EXIT_OK;
    for d in args.d_min..=args.d_max {
        match nu_star(d, args.n, args.tol) {
            Ok(r) => body.push_str(&format!("{d},{},{}\n", args.n, r.nu_star)),
            Err(e) => {
                eprintln!("warning: {e}");
                body.push_str(&format!("{d},{},\n", args.n));
                code = code.max(exit_code_for(&e));
            }
        }
    }
    print!("{body}");
    if let Some(out) = &args.out {
        let written =
            fs::write(out, &body).and_then(|_| write_manifest(out, "nustar", json!(args), None, started, clock));
        if let Err(e) = written {
            eprintln!("error: writing {}: {e}", out.display());
            return EXIT_USAGE;
        }
    }
    code
}

/// 17 significant digits, or `nan` for a failed cell.
fn format_stat(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |v| format!("{v:.16e}"))
}

fn format_row(xi: f64, nu: f64, grid: &ExperimentGrid, mean: Option<f64>, se: Option<f64>) -> String {
    format!(
        "{xi},{nu},{},{},{},{},{},{},{},{}\n",
        grid.d,
        grid.n,
        grid.prior_variant,
        format_stat(mean),
        format_stat(se),
        grid.replicates,
        grid.trials,
        grid.seed
    )
}

pub fn cmd_risk_surface(args: &RiskSurfaceArgs) -> i32 {
    let started = SystemTime::now();
    let clock = Instant::now();
    let xi_values = match args.xi.as_deref().map(parse_xi_spec) {
        None => default_xi_values(),
        Some(Ok(v)) => v,
        Some(Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let nu_values = match (&args.nu, args.prior) {
        (Some(v), _) => v.clone(),
        (None, RhoVariant::Kato) => vec![args.d as f64 / 2.0 - 1.0],
        (None, _) => default_nu_values(),
    };
    let grid = ExperimentGrid {
        d: args.d,
        n: args.n,
        xi_values,
        nu_values,
        prior_variant: args.prior,
        replicates: args.reps,
        trials: args.trials,
        seed: args.seed,
    };
    let cells = match run_grid(&grid) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    let mut failed = 0usize;
    for cell in &cells {
        match &cell.estimate {
            Ok(est) => body.push_str(&format_row(
                cell.xi,
                cell.nu,
                &grid,
                Some(est.mean),
                Some(est.std_error),
            )),
            Err(e) => {
                failed += 1;
                eprintln!("cell xi={} nu={} failed: {e}", cell.xi, cell.nu);
                body.push_str(&format_row(cell.xi, cell.nu, &grid, None, None));
            }
        }
    }
    let parameters = json!({ "args": args, "grid": grid });
    let written = fs::write(&args.out, &body)
        .and_then(|_| write_manifest(&args.out, "risk-surface", parameters, Some(args.seed), started, clock));
    if let Err(e) = written {
        eprintln!("error: writing {}: {e}", args.out.display());
        return EXIT_USAGE;
    }
    if failed > 0 {
        eprintln!("{failed} of {} cells failed", cells.len());
        EXIT_PARTIAL_GRID
    } else {
        EXIT_OK
    }
}

fn density_value(args: &DensityArgs) -> Result<f64, Error> {
    if args.xbar.len() != args.d {
        return Err(Error::DimensionMismatch {
            expected: args.d,
            got: args.xbar.len(),
        });
    }
    if args.y.len() != args.d {
        return Err(Error::DimensionMismatch {
            expected: args.d,
            got: args.y.len(),
        });
    }
    let stats = SufficientStats::new(args.xbar.clone(), args.s, args.n)?;
    match args.mode {
        DensityMode::Plugin => {
            let sigma2 = args.sigma2.unwrap_or(args.s / ((args.n - 1) * args.d) as f64);
            plug_in_logpdf(&args.y, &args.xbar, sigma2)
        }
        DensityMode::Equivariant => best_equivariant_logpdf(&args.y, &stats),
        DensityMode::Gm => {
            let nu = args
                .nu
                .ok_or_else(|| Error::InvalidArgument("--nu is required for --mode gm".into()))?;
            let spec = PriorSpec::new(nu, args.prior, args.n, args.d)?;
            GmPredictive::new(&spec, &QuadratureConfig::default())?.logpdf(&args.y, &stats)
        }
    }
}

pub fn cmd_density(args: &DensityArgs) -> i32 {
    match density_value(args) {
        Ok(logpdf) => {
            println!(
                "{}",
                json!({ "mode": args.mode, "logpdf": logpdf, "pdf": logpdf.exp() })
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_check(args: &CheckArgs) -> i32 {
    let reports = run_suite(args.suite, args.seed);
    let stderr = std::io::stderr();
    let mut err = stderr.lock();
    for r in &reports {
        let _ = write!(err, "{r}");
    }
    match serde_json::to_string_pretty(&reports) {
        Ok(s) => println!("{s}"),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INCOMPLETE;
        }
    }
    if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
