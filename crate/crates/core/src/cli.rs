//! Batch experiment runner: bounds, Monte Carlo estimates and verification
//! suites behind the `conicond` binary.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or parameter error,
//! 3 a bound violated by an estimate.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    application_bound, expectation_bound, linear_tail_bound, tail_bound, tube_ratio_bound, BoundMode, BoundParams,
    LinearTail, ProblemDescriptor,
};
use crate::condition::{
    cntr_witness_check, discriminant_distance_2x2, eigenvalue_condition, frobenius_condition, moore_penrose_condition,
    mu_norm, nearest_singular_matrix, random_system, real_eigen_condition_lower, singular_values, singular_witness,
    system_projective_distance, with_zero_at, CONDITION_CAP,
};
use crate::error::{domain, Error, Result};
use crate::mc::{default_workers, run_blocks, McConfig, McEstimate};
use crate::sampling::{sample_uniform_cap, sample_uniform_sphere, RngStream};
use crate::sphere_geom::{j_integral, j_integral_quadrature, sphere_volume, Cap, SpherePoint};
use crate::tubes::{
    distance_to_variety, estimate_tube_cap_ratios, random_curve, verify_kinematic, verify_weyl_tube_bound, Curve,
    Variety,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUND_VIOLATED: i32 = 3;

/// Stream index of the Monte Carlo samples.
const SAMPLE_STREAM: u64 = 0;
/// Stream index of a random cap center.
const CENTER_STREAM: u64 = 1;
/// Stream index of a random curve.
const CURVE_STREAM: u64 = 2;

/// Restarts and iterations of the eigenvalue distance search per sample.
const EIGEN_RESTARTS: usize = 2;
const EIGEN_ITERS: usize = 200;

#[derive(Parser, Debug)]
#[command(name = "conicond", version, about = "Smoothed analysis of conic condition numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a closed-form bound.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Monte Carlo estimates checked against the bounds; writes CSV and a manifest.
    #[command(subcommand)]
    Estimate(EstimateCommand),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug)]
struct PdArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    d: u64,
    #[arg(long)]
    sigma: f64,
}

#[derive(Args, Debug, Clone, Default)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated degrees of a polynomial system.
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ProblemKind {
    MatrixInversion,
    MoorePenrose,
    EigenReal,
    EigenComplex,
    PolySys,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Tail bound on Prob{C ≥ t}.
    Tail {
        #[command(flatten)]
        pd: PdArgs,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        json: bool,
    },
    /// Bound on E ln C, generic (--p --d) or per problem (--problem ...).
    Expectation {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        sigma: f64,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        json: bool,
    },
    /// Bound on the tube/cap volume ratio.
    Tube {
        #[command(flatten)]
        pd: PdArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Linear bound for small eps.
    Linear {
        #[command(flatten)]
        pd: PdArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Per-problem bound: tail with --t, otherwise expectation.
    Application {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to $CONICOND_WORKERS or the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Output prefix for `<out>.csv` and `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "north")]
    center: CenterKind,
    /// JSON array of center coordinates, used with `--center file`.
    #[arg(long)]
    center_file: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CenterKind {
    Random,
    North,
    File,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum VarietyKind {
    Subsphere,
    Determinant,
    Curve,
    RandomCurve,
}

#[derive(Subcommand, Debug)]
enum EstimateCommand {
    /// Empirical Prob{C ≥ t} on a t grid.
    Tail {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma list or `logspace:lo:hi:count`.
        #[arg(long, default_value = "logspace:2:1000:6")]
        t_grid: String,
    },
    /// Empirical E ln C.
    Logmean {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Empirical tube/cap volume ratio on an eps grid.
    Tube {
        #[arg(long, value_enum)]
        variety: VarietyKind,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        curve_file: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Comma list or `logspace:lo:hi:count`.
        #[arg(long, default_value = "logspace:0.001:0.5:6")]
        eps_grid: String,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Kinematic formula for geodesic spheres; the default grid when --p, --i and --alpha are absent.
    Kinematic {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Tube volume of geodesic spheres against the curvature bound.
    Weyltube {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 6])]
        p: Vec<usize>,
    },
    /// Quadrature against the closed-form J integrals, and their inequalities.
    Jintegrals {
        #[arg(long, default_value_t = 20)]
        max_p: usize,
    },
    /// Nearest singular matrix and distance to the determinant variety.
    EckartYoung {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Eigenvalue condition against the distance to a double eigenvalue.
    Wilkinson {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Witnesses for the condition number theorem of polynomial systems.
    Cntr {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Formats with six significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Parses a comma list of numbers or `logspace:lo:hi:count` (geometric,
/// endpoints included).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Invalid(format!("cannot parse grid {spec:?}"));
    let grid: Vec<f64> = if let Some(rest) = spec.strip_prefix("logspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > 0.0) || count == 0 {
            return Err(bad());
        }
        if count == 1 {
            vec![lo]
        } else {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count).map(|k| if k + 1 == count { hi } else { lo * (ratio * k as f64).exp() }).collect()
        }
    } else {
        spec.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn problem_descriptor(args: &ProblemArgs) -> Result<ProblemDescriptor> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Error::Invalid(format!("--{flag} is required")));
    let kind = args.problem.ok_or_else(|| Error::Invalid("--problem is required".into()))?;
    Ok(match kind {
        ProblemKind::MatrixInversion => ProblemDescriptor::MatrixInversion { n: need(args.n, "n")? },
        ProblemKind::MoorePenrose => ProblemDescriptor::MoorePenrose { l: need(args.l, "l")?, m: need(args.m, "m")? },
        ProblemKind::EigenReal => ProblemDescriptor::EigenReal { n: need(args.n, "n")? },
        ProblemKind::EigenComplex => ProblemDescriptor::EigenComplex { n: need(args.n, "n")? },
        ProblemKind::PolySys => {
            if args.degrees.is_empty() {
                return Err(Error::Invalid("--degrees is required".into()));
            }
            ProblemDescriptor::PolySys { degrees: args.degrees.clone() }
        }
    })
}

/// Reads a JSON array of coordinates and normalizes it, warning on stderr
/// when the norm is off by more than `1e-6`.
pub fn load_center(path: &Path) -> Result<SpherePoint> {
    let coords: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: center in {} has norm {norm}; normalizing", path.display());
    }
    SpherePoint::from_vector(coords)
}

fn resolve_center(run: &RunArgs, p: usize) -> Result<SpherePoint> {
    match run.center {
        CenterKind::North => SpherePoint::north(p),
        CenterKind::Random => sample_uniform_sphere(p, &mut RngStream::new(run.seed, CENTER_STREAM)),
        CenterKind::File => {
            let path = run.center_file.as_ref().ok_or_else(|| Error::Invalid("--center file needs --center-file".into()))?;
            let c = load_center(path)?;
            if c.dim() != p {
                return Err(Error::DimensionMismatch { expected: p + 1, got: c.dim() + 1 });
            }
            Ok(c)
        }
    }
}

/// Condition number of the problem instance with row-major coordinates `x`.
///
/// Eigenvalue problems use [`real_eigen_condition_lower`], which can only
/// understate the condition number.
pub fn problem_condition(problem: &ProblemDescriptor, x: &[f64], rng: &mut RngStream) -> Result<f64> {
    match problem {
        ProblemDescriptor::MatrixInversion { n } => frobenius_condition(&DMatrix::from_row_slice(*n, *n, x)),
        ProblemDescriptor::MoorePenrose { l, m } => moore_penrose_condition(&DMatrix::from_row_slice(*l, *m, x)),
        ProblemDescriptor::EigenReal { n } => {
            real_eigen_condition_lower(&DMatrix::from_row_slice(*n, *n, x), EIGEN_RESTARTS, EIGEN_ITERS, rng)
        }
        other => domain(format!("estimates are not implemented for {other:?}")),
    }
}

/// One row of a tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub empirical: McEstimate,
    pub bound: f64,
}

impl TailRow {
    pub fn dominated(&self) -> bool {
        self.empirical.ci_low <= self.bound
    }
}

/// Empirical `Prob{C ≥ t}` over uniform samples of `cap` for each `t`.
pub fn estimate_tail(
    problem: &ProblemDescriptor,
    cap: &Cap,
    t_grid: &[f64],
    config: &McConfig,
    rng: &RngStream,
) -> Result<Vec<TailRow>> {
    let (p, _) = problem.dims()?;
    if cap.dim() != p {
        return Err(Error::DimensionMismatch { expected: p + 1, got: cap.dim() + 1 });
    }
    let bounds = t_grid
        .iter()
        .map(|&t| application_bound(problem, cap.sigma(), BoundMode::Tail { t }))
        .collect::<Result<Vec<_>>>()?;
    let blocks = run_blocks(config, rng, |block_rng, count| -> Result<Vec<usize>> {
        let mut hits = vec![0usize; t_grid.len()];
        for _ in 0..count {
            let x = sample_uniform_cap(cap, block_rng);
            let c = problem_condition(problem, x.coords(), block_rng)?;
            for (h, &t) in hits.iter_mut().zip(t_grid) {
                if c >= t {
                    *h += 1;
                }
            }
        }
        Ok(hits)
    });
    let mut totals = vec![0usize; t_grid.len()];
    for block in blocks {
        for (total, h) in totals.iter_mut().zip(block?) {
            *total += h;
        }
    }
    Ok(t_grid
        .iter()
        .zip(totals)
        .zip(bounds)
        .map(|((&t, k), bound)| TailRow { t, empirical: McEstimate::proportion(k, config.samples, rng.master_seed()), bound })
        .collect())
}

/// Empirical mean of `ln C` against the expectation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMeanRow {
    pub empirical: McEstimate,
    pub bound: f64,
}

impl LogMeanRow {
    pub fn dominated(&self) -> bool {
        self.empirical.ci_low <= self.bound
    }
}

/// Empirical `E ln C` over uniform samples of `cap`; condition numbers are
/// capped at [`CONDITION_CAP`] so the mean stays finite.
pub fn estimate_logmean(
    problem: &ProblemDescriptor,
    cap: &Cap,
    config: &McConfig,
    rng: &RngStream,
) -> Result<LogMeanRow> {
    let (p, _) = problem.dims()?;
    if cap.dim() != p {
        return Err(Error::DimensionMismatch { expected: p + 1, got: cap.dim() + 1 });
    }
    if config.samples < 2 {
        return domain("a log-mean estimate needs at least 2 samples");
    }
    let bound = application_bound(problem, cap.sigma(), BoundMode::Expectation)?;
    let blocks = run_blocks(config, rng, |block_rng, count| -> Result<(f64, f64)> {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..count {
            let x = sample_uniform_cap(cap, block_rng);
            let v = problem_condition(problem, x.coords(), block_rng)?.min(CONDITION_CAP).ln();
            sum += v;
            sum_sq += v * v;
        }
        Ok((sum, sum_sq))
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for block in blocks {
        let (s, q) = block?;
        sum += s;
        sum_sq += q;
    }
    Ok(LogMeanRow { empirical: McEstimate::sample_mean(sum, sum_sq, config.samples, rng.master_seed()), bound })
}

/// One row of a tube-ratio estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeRow {
    pub eps: f64,
    pub empirical: McEstimate,
    pub bound: f64,
}

impl TubeRow {
    pub fn dominated(&self) -> bool {
        self.empirical.ci_low <= self.bound
    }
}

/// Empirical tube/cap ratios against the bound at `d = variety.degree()`.
pub fn estimate_tube(
    variety: &Variety,
    cap: &Cap,
    eps_grid: &[f64],
    config: &McConfig,
    rng: &RngStream,
) -> Result<Vec<TubeRow>> {
    let params = BoundParams::new(variety.dim()?, variety.degree(), cap.sigma())?;
    let bounds = eps_grid.iter().map(|&eps| tube_ratio_bound(&params, eps)).collect::<Result<Vec<_>>>()?;
    let estimates = estimate_tube_cap_ratios(variety, cap, eps_grid, config, rng)?;
    Ok(eps_grid
        .iter()
        .zip(estimates)
        .zip(bounds)
        .map(|((&eps, empirical), bound)| TubeRow { eps, empirical, bound })
        .collect())
}

/// Everything needed to rerun an estimate.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: String,
    pub parameters: BTreeMap<String, Value>,
    pub master_seed: u64,
    pub worker_count: usize,
    pub sample_count: usize,
    pub wall_time_seconds: f64,
    pub artifact_version: String,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// A verification case and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl CaseResult {
    fn new(name: impl Into<String>, detail: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), detail: detail.into(), pass }
    }
}

pub fn all_pass(cases: &[CaseResult]) -> bool {
    cases.iter().all(|c| c.pass)
}

/// `(p, i, α)` with `p ∈ {2,…,5}`, `i < p − 1`, `α ∈ {0.3, 0.6, 1.0, 1.4}`.
pub fn kinematic_analytic_grid() -> Vec<(usize, usize, f64)> {
    let mut grid = Vec::new();
    for p in 2..=5 {
        for i in 0..p - 1 {
            for alpha in [0.3, 0.6, 1.0, 1.4] {
                grid.push((p, i, alpha));
            }
        }
    }
    grid
}

/// Cases checked by Monte Carlo by default.
pub fn kinematic_monte_carlo_grid() -> Vec<(usize, usize, f64)> {
    vec![(2, 0, FRAC_PI_4), (3, 0, FRAC_PI_4), (3, 1, FRAC_PI_4), (4, 1, FRAC_PI_4)]
}

/// Analytic identity to `1e-10` relative on `analytic`; Monte Carlo within
/// three half-widths on `monte_carlo`, case `k` drawing from stream `k`.
pub fn kinematic_suite(
    analytic: &[(usize, usize, f64)],
    monte_carlo: &[(usize, usize, f64)],
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    let tiny = McConfig::new(1).with_workers(1);
    for &(p, i, alpha) in analytic {
        let check = verify_kinematic(p, i, alpha, &tiny, &RngStream::new(seed, 0))?;
        let gap = check.analytic_relative_gap();
        cases.push(CaseResult::new(
            format!("analytic p={p} i={i} alpha={alpha}"),
            format!("lhs={} rhs={} rel_gap={gap:.2e}", check.lhs, check.analytic_rhs),
            gap <= 1e-10,
        ));
    }
    let config = McConfig::new(samples).with_workers(workers);
    for (k, &(p, i, alpha)) in monte_carlo.iter().enumerate() {
        let check = verify_kinematic(p, i, alpha, &config, &RngStream::new(seed, k as u64))?;
        let half = check.rhs.half_width();
        cases.push(CaseResult::new(
            format!("monte-carlo p={p} i={i} alpha={alpha}"),
            format!(
                "lhs={} rhs={} half_width={half:.3e} gap/half_width={:.2}",
                check.lhs,
                check.rhs.estimate,
                (check.rhs.estimate - check.lhs).abs() / half
            ),
            check.within_half_widths(3.0) && check.analytic_relative_gap() <= 1e-10,
        ));
    }
    Ok(cases)
}

/// `α ∈ {0.2, 0.4, …, 1.4, π/2}`, `β ∈ {α/4, α/2, 3α/4}`; at `α = π/2` the
/// bound must also be attained to `1e-12` relative.
pub fn weyl_tube_suite(ps: &[usize]) -> Result<Vec<CaseResult>> {
    let mut alphas: Vec<f64> = (1..=7).map(|k| 0.2 * k as f64).collect();
    alphas.push(FRAC_PI_2);
    let mut cases = Vec::new();
    for &p in ps {
        for &alpha in &alphas {
            for beta in [alpha / 4.0, alpha / 2.0, 3.0 * alpha / 4.0] {
                let check = verify_weyl_tube_bound(p, alpha, beta)?;
                let equator = alpha == FRAC_PI_2;
                let gap = check.relative_gap();
                let pass = check.pass && (!equator || gap.abs() <= 1e-12);
                cases.push(CaseResult::new(
                    format!("p={p} alpha={alpha:.4} beta={beta:.4}"),
                    format!("lhs={} rhs={} rel_gap={gap:.2e}", check.lhs, check.rhs),
                    pass,
                ));
            }
        }
    }
    Ok(cases)
}

/// Twenty radii evenly spaced on `[0.1, π/2]`.
pub fn j_alpha_grid() -> Vec<f64> {
    (0..20).map(|k| 0.1 + (FRAC_PI_2 - 0.1) * k as f64 / 19.0).collect()
}

/// Recurrence against quadrature for `p ≤ max_p`, `1 ≤ k ≤ p`, relative
/// difference at most `1e-10`; one case per `p`.
pub fn j_consistency_suite(max_p: usize) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for p in 1..=max_p {
        let mut worst = 0.0f64;
        for k in 1..=p {
            for alpha in j_alpha_grid() {
                let exact = j_integral(p, k, alpha)?;
                let quad = j_integral_quadrature(p, k, alpha)?;
                worst = worst.max((exact - quad).abs() / exact.abs());
            }
        }
        cases.push(CaseResult::new(format!("consistency p={p}"), format!("max_rel_diff={worst:.2e}"), worst <= 1e-10));
    }
    Ok(cases)
}

/// `J_{p,k}(α) ≤ εᵏ/k` for `k < p` and `εᵖ/p ≤ J_{p,p}(α) ≤ O_p/(2O_{p−1}) εᵖ`,
/// `ε = sin α`, with the upper bound attained at `α = π/2`.
pub fn j_inequality_suite(max_p: usize) -> Result<Vec<CaseResult>> {
    const SLACK: f64 = 1e-12;
    let mut cases = Vec::new();
    for p in 1..=max_p {
        let mut violations = Vec::new();
        let ratio = sphere_volume(p) / (2.0 * sphere_volume(p - 1));
        for k in 1..=p {
            for alpha in j_alpha_grid() {
                let eps = alpha.sin();
                let j = j_integral(p, k, alpha)?;
                let ok = if k < p {
                    j <= eps.powi(k as i32) / k as f64 * (1.0 + SLACK)
                } else {
                    let lower = eps.powi(p as i32) / p as f64;
                    j >= lower * (1.0 - SLACK) && j <= ratio * eps.powi(p as i32) * (1.0 + SLACK)
                };
                if !ok {
                    violations.push(format!("k={k} alpha={alpha:.4}"));
                }
            }
        }
        let top = j_integral(p, p, FRAC_PI_2)?;
        let equality_gap = (top - ratio).abs() / ratio;
        let pass = violations.is_empty() && equality_gap <= 1e-12;
        cases.push(CaseResult::new(
            format!("inequalities p={p}"),
            format!("violations={violations:?} equality_rel_gap={equality_gap:.2e}"),
            pass,
        ));
    }
    Ok(cases)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.standard_normal())
}

/// Random unit-norm `n × n` matrices, `n` cycling through `2..=5`: the SVD
/// truncation sits at distance `σ_min`, and `κ_F · d_P(·, Σ) = 1`.
pub fn eckart_young_suite(trials: usize, seed: u64) -> Result<Vec<CaseResult>> {
    let mut rng = RngStream::new(seed, 0);
    let mut worst_trunc = [0.0f64; 4];
    let mut worst_product = [0.0f64; 4];
    let mut counts = [0usize; 4];
    for trial in 0..trials {
        let slot = trial % 4;
        let n = 2 + slot;
        let a = gaussian_matrix(n, n, &mut rng);
        let a = &a / a.norm();
        let smin = singular_values(&a)[0];
        let trunc = nearest_singular_matrix(&a)?;
        worst_trunc[slot] = worst_trunc[slot].max(((&a - trunc).norm() - smin).abs());
        let x = SpherePoint::from_vector(a.transpose().iter().copied().collect())?;
        let d = distance_to_variety(&x, &Variety::Determinant { n })?;
        let product = frobenius_condition(&a)? * d;
        worst_product[slot] = worst_product[slot].max((product - 1.0).abs());
        counts[slot] += 1;
    }
    Ok((0..4)
        .filter(|&s| counts[s] > 0)
        .map(|s| {
            CaseResult::new(
                format!("n={}", s + 2),
                format!(
                    "trials={} max|trunc-sigma_min|={:.2e} max|kappa*d-1|={:.2e}",
                    counts[s], worst_trunc[s], worst_product[s]
                ),
                worst_trunc[s] <= 1e-10 && worst_product[s] <= 1e-8,
            )
        })
        .collect())
}

/// Random 2×2 matrices with simple real eigenvalues: for both eigenvalues,
/// `κ(A, λ) ≤ √2 ‖A‖_F / dist(A, Σ) + 10⁻⁶` with the brute-force distance.
pub fn wilkinson_suite(trials: usize, seed: u64) -> Result<Vec<CaseResult>> {
    let mut rng = RngStream::new(seed, 0);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut failures = 0usize;
    let mut done = 0usize;
    while done < trials {
        let a = [[rng.standard_normal(), rng.standard_normal()], [rng.standard_normal(), rng.standard_normal()]];
        let disc = (a[0][0] - a[1][1]).powi(2) + 4.0 * a[0][1] * a[1][0];
        let fro = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if disc <= 1e-6 * fro * fro {
            continue;
        }
        done += 1;
        let m = DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
        let dist = discriminant_distance_2x2(&a);
        let rhs = SQRT_2 * fro / dist;
        let tr = a[0][0] + a[1][1];
        for lambda in [(tr + disc.sqrt()) / 2.0, (tr - disc.sqrt()) / 2.0] {
            let kappa = eigenvalue_condition(&m, lambda)?;
            let excess = kappa - rhs;
            worst_excess = worst_excess.max(excess);
            if excess > 1e-6 {
                failures += 1;
            }
        }
    }
    Ok(vec![CaseResult::new(
        "n=2",
        format!("trials={trials} failures={failures} max(kappa - bound)={worst_excess:.3e}"),
        failures == 0,
    )])
}

/// Univariate systems of degree `d ∈ {2,3,4}` with a prescribed zero `ζ`
/// and their singular witnesses `g`: `μ_norm(f, ζ) · d_P(f, g) ≥ 1 − 10⁻⁶`.
pub fn cntr_suite(trials: usize, seed: u64) -> Result<Vec<CaseResult>> {
    let mut rng = RngStream::new(seed, 0);
    let mut cases = Vec::new();
    let mut min_product = [f64::INFINITY; 3];
    let mut failures = [0usize; 3];
    let mut counts = [0usize; 3];
    for trial in 0..trials {
        let slot = trial % 3;
        let d = 2 + slot as u32;
        let zeta = sample_uniform_sphere(1, &mut rng)?;
        let f = with_zero_at(&random_system(1, &[d], &mut rng)?, &zeta)?.normalized()?;
        let g = singular_witness(&f, &zeta)?.normalized()?;
        let pass = cntr_witness_check(&f, &zeta, &g)?;
        let product = mu_norm(&f, &zeta)? * system_projective_distance(&f, &g)?;
        min_product[slot] = min_product[slot].min(product);
        counts[slot] += 1;
        if !pass {
            failures[slot] += 1;
        }
    }
    for slot in 0..3 {
        if counts[slot] == 0 {
            continue;
        }
        cases.push(CaseResult::new(
            format!("n=1 d={}", slot + 2),
            format!("trials={} failures={} min(mu*d_P)={:.12}", counts[slot], failures[slot], min_product[slot]),
            failures[slot] == 0,
        ));
    }
    Ok(cases)
}

/// Runs the CLI on `args` (program name first); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let outcome = match cli.command {
        Command::Bounds(cmd) => cmd_bounds(cmd, out),
        Command::Estimate(cmd) => cmd_estimate(cmd, &command_line, out),
        Command::Verify(cmd) => cmd_verify(cmd, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn print_value(out: &mut dyn Write, json: bool, params: Value, value: f64) -> Result<i32> {
    if json {
        writeln!(out, "{}", serde_json::to_string(&json!({ "params": params, "value": value }))?)?;
    } else {
        writeln!(out, "{}", format_sig(value))?;
    }
    Ok(EXIT_OK)
}

fn problem_json(problem: &ProblemDescriptor) -> Value {
    serde_json::to_value(problem).unwrap_or(Value::Null)
}

fn cmd_bounds(cmd: BoundsCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        BoundsCommand::Tail { pd, t, json } => {
            let value = tail_bound(&BoundParams::new(pd.p, pd.d, pd.sigma)?, t)?;
            print_value(out, json, json!({"p": pd.p, "d": pd.d, "sigma": pd.sigma, "t": t}), value)
        }
        BoundsCommand::Expectation { p, d, sigma, problem, json } => {
            if problem.problem.is_some() {
                let desc = problem_descriptor(&problem)?;
                let value = application_bound(&desc, sigma, BoundMode::Expectation)?;
                print_value(out, json, json!({"problem": problem_json(&desc), "sigma": sigma}), value)
            } else {
                let (p, d) = match (p, d) {
                    (Some(p), Some(d)) => (p, d),
                    _ => return Err(Error::Invalid("give --p and --d, or --problem".into())),
                };
                let value = expectation_bound(&BoundParams::new(p, d, sigma)?)?;
                print_value(out, json, json!({"p": p, "d": d, "sigma": sigma}), value)
            }
        }
        BoundsCommand::Tube { pd, eps, json } => {
            let value = tube_ratio_bound(&BoundParams::new(pd.p, pd.d, pd.sigma)?, eps)?;
            print_value(out, json, json!({"p": pd.p, "d": pd.d, "sigma": pd.sigma, "eps": eps}), value)
        }
        BoundsCommand::Linear { pd, eps, json } => {
            let params = json!({"p": pd.p, "d": pd.d, "sigma": pd.sigma, "eps": eps});
            match linear_tail_bound(pd.p, pd.d, pd.sigma, eps)? {
                LinearTail::Bound { value } => print_value(out, json, params, value),
                LinearTail::NotApplicable { threshold } => {
                    if json {
                        let v = json!({"params": params, "value": Value::Null, "applicable_up_to": threshold});
                        writeln!(out, "{}", serde_json::to_string(&v)?)?;
                    } else {
                        writeln!(out, "not applicable (needs eps <= {})", format_sig(threshold))?;
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        BoundsCommand::Application { problem, sigma, t, json } => {
            let desc = problem_descriptor(&problem)?;
            let mode = match t {
                Some(t) => BoundMode::Tail { t },
                None => BoundMode::Expectation,
            };
            let value = application_bound(&desc, sigma, mode)?;
            print_value(out, json, json!({"problem": problem_json(&desc), "sigma": sigma, "t": t}), value)
        }
    }
}

struct Artifact {
    header: &'static str,
    rows: Vec<(String, bool)>,
    parameters: BTreeMap<String, Value>,
}

fn cmd_estimate(cmd: EstimateCommand, command_line: &str, out: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let run_args = match &cmd {
        EstimateCommand::Tail { run, .. } | EstimateCommand::Logmean { run, .. } | EstimateCommand::Tube { run, .. } => {
            run.clone()
        }
    };
    let workers = run_args.workers.unwrap_or_else(default_workers).max(1);
    let config = McConfig::new(run_args.samples).with_workers(workers);
    if config.samples == 0 {
        return Err(Error::Invalid("--samples must be positive".into()));
    }
    let rng = RngStream::new(run_args.seed, SAMPLE_STREAM);
    let mut parameters = BTreeMap::new();
    parameters.insert("sigma".to_string(), json!(run_args.sigma));
    parameters.insert("center".to_string(), json!(format!("{:?}", run_args.center).to_lowercase()));
    if let Some(path) = &run_args.center_file {
        parameters.insert("center_file".to_string(), json!(path.display().to_string()));
    }
    let artifact = match cmd {
        EstimateCommand::Tail { problem, t_grid, .. } => {
            let desc = problem_descriptor(&problem)?;
            let (p, _) = desc.dims()?;
            let center = resolve_center(&run_args, p)?;
            let grid = parse_grid(&t_grid)?;
            let cap = Cap::new(center.clone(), run_args.sigma)?;
            let rows = estimate_tail(&desc, &cap, &grid, &config, &rng)?;
            parameters.insert("problem".to_string(), problem_json(&desc));
            parameters.insert("t_grid".to_string(), json!(grid));
            parameters.insert("center_coords".to_string(), json!(center.coords()));
            Artifact {
                header: "t,empirical,ci_low,ci_high,bound,dominated",
                rows: rows
                    .iter()
                    .map(|r| {
                        let e = r.empirical;
                        let line = [float(r.t), float(e.estimate), float(e.ci_low), float(e.ci_high), float(r.bound)]
                            .join(",");
                        (format!("{line},{}", r.dominated()), r.dominated())
                    })
                    .collect(),
                parameters,
            }
        }
        EstimateCommand::Logmean { problem, .. } => {
            let desc = problem_descriptor(&problem)?;
            let (p, _) = desc.dims()?;
            let center = resolve_center(&run_args, p)?;
            let cap = Cap::new(center.clone(), run_args.sigma)?;
            let row = estimate_logmean(&desc, &cap, &config, &rng)?;
            parameters.insert("problem".to_string(), problem_json(&desc));
            parameters.insert("center_coords".to_string(), json!(center.coords()));
            let e = row.empirical;
            let line = [float(e.estimate), float(e.ci_low), float(e.ci_high), float(row.bound)].join(",");
            Artifact {
                header: "empirical_mean_ln,ci_low,ci_high,bound,dominated",
                rows: vec![(format!("{line},{}", row.dominated()), row.dominated())],
                parameters,
            }
        }
        EstimateCommand::Tube { variety, p, m, n, degree, curve_file, eps_grid, .. } => {
            let need_p = || p.ok_or_else(|| Error::Invalid("--p is required".into()));
            let (variety, description) = match variety {
                VarietyKind::Subsphere => {
                    let p = need_p()?;
                    if p == 0 {
                        return Err(Error::Invalid("--p must be positive".into()));
                    }
                    let m = m.unwrap_or(p - 1);
                    if m >= p {
                        return Err(Error::Invalid(format!("--m must be below --p, got m={m}, p={p}")));
                    }
                    (Variety::Subsphere { p, m }, json!({"kind": "subsphere", "p": p, "m": m}))
                }
                VarietyKind::Determinant => {
                    let n = n.ok_or_else(|| Error::Invalid("--n is required".into()))?;
                    if n < 2 {
                        return Err(Error::Invalid("--n must be at least 2".into()));
                    }
                    (Variety::Determinant { n }, json!({"kind": "determinant", "n": n}))
                }
                VarietyKind::Curve => {
                    let path = curve_file.ok_or_else(|| Error::Invalid("--curve-file is required".into()))?;
                    let curve = Curve::load(&path)?;
                    let text = curve.to_json_string()?;
                    let v: Value = serde_json::from_str(&text)?;
                    (Variety::Curve(curve), json!({"kind": "curve", "file": path.display().to_string(), "curve": v}))
                }
                VarietyKind::RandomCurve => {
                    let degree = degree.ok_or_else(|| Error::Invalid("--degree is required".into()))?;
                    let curve = random_curve(degree, &mut RngStream::new(run_args.seed, CURVE_STREAM))?;
                    let v: Value = serde_json::from_str(&curve.to_json_string()?)?;
                    (Variety::Curve(curve), json!({"kind": "random-curve", "degree": degree, "curve": v}))
                }
            };
            let dim = variety.dim()?;
            let center = resolve_center(&run_args, dim)?;
            let cap = Cap::new(center.clone(), run_args.sigma)?;
            let grid = parse_grid(&eps_grid)?;
            let rows = estimate_tube(&variety, &cap, &grid, &config, &rng)?;
            parameters.insert("variety".to_string(), description);
            parameters.insert("degree".to_string(), json!(variety.degree()));
            parameters.insert("eps_grid".to_string(), json!(grid));
            parameters.insert("center_coords".to_string(), json!(center.coords()));
            if let Variety::Curve(c) = &variety {
                parameters.insert("curve_mesh_points".to_string(), json!(c.mesh().len()));
                parameters.insert("curve_mesh_resolution".to_string(), json!(c.mesh_resolution()));
            }
            Artifact {
                header: "eps,empirical_ratio,ci_low,ci_high,bound,dominated",
                rows: rows
                    .iter()
                    .map(|r| {
                        let e = r.empirical;
                        let line = [float(r.eps), float(e.estimate), float(e.ci_low), float(e.ci_high), float(r.bound)]
                            .join(",");
                        (format!("{line},{}", r.dominated()), r.dominated())
                    })
                    .collect(),
                parameters,
            }
        }
    };
    let mut csv = String::new();
    writeln!(csv, "{}", artifact.header).expect("writing to a String");
    for (line, _) in &artifact.rows {
        writeln!(csv, "{line}").expect("writing to a String");
    }
    let csv_path = with_extension(&run_args.out, ".csv");
    let manifest_path = with_extension(&run_args.out, ".manifest.json");
    std::fs::write(&csv_path, csv)?;
    let manifest = RunManifest {
        command_line: command_line.to_string(),
        parameters: artifact.parameters,
        master_seed: run_args.seed,
        worker_count: workers,
        sample_count: config.samples,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    let violated = artifact.rows.iter().filter(|(_, ok)| !ok).count();
    writeln!(out, "wrote {} ({} rows) and {}", csv_path.display(), artifact.rows.len(), manifest_path.display())?;
    if violated > 0 {
        writeln!(out, "bound violated in {violated} row(s)")?;
        return Ok(EXIT_BOUND_VIOLATED);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cmd: VerifyCommand, out: &mut dyn Write) -> Result<i32> {
    let cases = match cmd {
        VerifyCommand::Kinematic { p, i, alpha, samples, seed, workers } => {
            let workers = workers.unwrap_or_else(default_workers);
            match (p, i, alpha) {
                (Some(p), Some(i), Some(alpha)) => kinematic_suite(&[(p, i, alpha)], &[(p, i, alpha)], samples, seed, workers)?,
                (None, None, None) => {
                    kinematic_suite(&kinematic_analytic_grid(), &kinematic_monte_carlo_grid(), samples, seed, workers)?
                }
                _ => return Err(Error::Invalid("give all of --p, --i and --alpha, or none".into())),
            }
        }
        VerifyCommand::Weyltube { p } => weyl_tube_suite(&p)?,
        VerifyCommand::Jintegrals { max_p } => {
            let mut cases = j_consistency_suite(max_p)?;
            cases.extend(j_inequality_suite(max_p)?);
            cases
        }
        VerifyCommand::EckartYoung { trials, seed } => eckart_young_suite(trials, seed)?,
        VerifyCommand::Wilkinson { n, trials, seed } => {
            if n != 2 {
                return Err(Error::Invalid("the distance oracle is exact only for n = 2".into()));
            }
            wilkinson_suite(trials, seed)?
        }
        VerifyCommand::Cntr { trials, seed } => cntr_suite(trials, seed)?,
    };
    for c in &cases {
        writeln!(out, "{} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let failed = cases.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        writeln!(out, "all {} cases passed", cases.len())?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "{failed} of {} cases failed", cases.len())?;
        Ok(EXIT_VERIFY_FAILED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("conicond").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(3.507_397), "3.50740");
        assert_eq!(format_sig(9.658_883), "9.65888");
        assert_eq!(format_sig(0.000_123_456_78), "0.000123457");
        assert_eq!(format_sig(1.5e-9), "1.50000e-9");
        assert_eq!(format_sig(123_456.7), "123457");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1, 2.5,10").unwrap(), vec![1.0, 2.5, 10.0]);
        let g = parse_grid("logspace:2:1000:6").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0], g[5]), (2.0, 1000.0));
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 500f64.powf(0.2)).abs() < 1e-12);
        }
        assert!(parse_grid("logspace:0:1:3").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(run_capture(&["bounds", "tail", "--p", "3", "--d", "1", "--sigma", "1", "--t", "10"]), (0, "3.50740\n".into()));
        assert_eq!(
            run_capture(&["bounds", "expectation", "--problem", "matrix-inversion", "--n", "2", "--sigma", "1"]),
            (0, "9.65888\n".into())
        );
        let (code, text) = run_capture(&["bounds", "linear", "--p", "2", "--d", "1", "--sigma", "1", "--eps", "0.9"]);
        assert_eq!(code, 0);
        assert!(text.starts_with("not applicable"));
        let (code, text) = run_capture(&["bounds", "tube", "--p", "3", "--d", "1", "--sigma", "1", "--eps", "0.1", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert!((v["value"].as_f64().unwrap() - 3.507_397).abs() < 1e-5);
        assert_eq!(v["params"]["p"], 3);
    }

    #[test]
    fn bad_input_exits_with_usage_code() {
        assert_eq!(run_capture(&["bounds", "tail", "--p", "3", "--d", "1", "--sigma", "2", "--t", "10"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bounds", "tail", "--p", "3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bounds", "expectation", "--sigma", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["verify", "wilkinson", "--n", "3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn application_bounds() {
        let (code, text) = run_capture(&["bounds", "application", "--problem", "eigen-real", "--n", "2", "--sigma", "1", "--t", "1.2"]);
        assert_eq!((code, text.as_str()), (EXIT_USAGE, ""));
        let (code, text) = run_capture(&["bounds", "application", "--problem", "poly-sys", "--degrees", "2,3", "--sigma", "1"]);
        assert_eq!(code, 0);
        let expected = 2.0 * 15f64.ln() + 4.0 * 6f64.ln() + 2.0 * 2f64.ln() + 7.0;
        assert_eq!(text.trim(), format_sig(expected));
    }

    #[test]
    fn problem_condition_reads_row_major() {
        let mut rng = RngStream::new(0, 0);
        let problem = ProblemDescriptor::MoorePenrose { l: 3, m: 2 };
        let x = [1.0, 0.0, 0.0, 2.0, 0.0, 0.0];
        let c = problem_condition(&problem, &x, &mut rng).unwrap();
        assert!((c - 5f64.sqrt()).abs() < 1e-14);
        assert!(problem_condition(&ProblemDescriptor::PolySys { degrees: vec![2] }, &[1.0; 3], &mut rng).is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(all_pass(&wilkinson_suite(50, 1).unwrap()));
        assert!(all_pass(&cntr_suite(30, 1).unwrap()));
        assert!(all_pass(&eckart_young_suite(40, 1).unwrap()));
        assert!(all_pass(&weyl_tube_suite(&[2, 3]).unwrap()));
        assert!(all_pass(&j_inequality_suite(6).unwrap()));
    }

    #[test]
    fn estimate_writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("tail");
        let prefix_str = prefix.to_str().unwrap();
        let (code, _) = run_capture(&[
            "estimate", "tail", "--problem", "matrix-inversion", "--n", "2", "--sigma", "1", "--samples", "5000",
            "--seed", "3", "--workers", "2", "--out", prefix_str, "--t-grid", "2,10,100",
        ]);
        assert_eq!(code, 0);
        let csv = std::fs::read_to_string(with_extension(&prefix, ".csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,empirical,ci_low,ci_high,bound,dominated");
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(with_extension(&prefix, ".manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["master_seed"], 3);
        assert_eq!(manifest["worker_count"], 2);
        assert_eq!(manifest["sample_count"], 5000);
    }
}
