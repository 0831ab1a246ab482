//! Closed-form upper bounds on condition-number tails, log-expectations,
//! tube volumes and curvature integrals.
//!
//! Every sum of binomial-weighted powers is accumulated in log space. The
//! `ln_*` evaluators stay finite for `p` in the tens of thousands; their
//! exponentiated counterparts saturate to `+∞` once the bound itself leaves
//! the `f64` range.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sphere_geom::{binomial, ln_binomial, ln_sphere_volume};

/// `(p, d, σ)`: sphere dimension, degree bound and cap radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub p: usize,
    pub d: u64,
    pub sigma: f64,
}

impl BoundParams {
    pub fn new(p: usize, d: u64, sigma: f64) -> Result<Self> {
        if p == 0 {
            return domain("p must be at least 1");
        }
        if d == 0 {
            return domain("d must be at least 1");
        }
        check_unit("sigma", sigma)?;
        Ok(Self { p, d, sigma })
    }

    fn ln_d(&self) -> f64 {
        (self.d as f64).ln()
    }
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value <= 1.0) {
        return domain(format!("{name} must lie in (0, 1], got {value}"));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 1.0 && t.is_finite()) {
        return domain(format!("t must be a finite value >= 1, got {t}"));
    }
    Ok(())
}

/// `ln Σ exp(terms)`.
fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Logarithm of
/// `4 Σ_{k=1}^{p-1} C(p,k)(2d)^k (1+x)^{p-k} x^k + (2p O_p/O_{p-1})(2d)^p x^p`.
fn ln_tube_sum(params: &BoundParams, x: f64) -> f64 {
    let p = params.p;
    let pf = p as f64;
    let ln_2d = std::f64::consts::LN_2 + params.ln_d();
    let (ln_x, ln_1x) = (x.ln(), x.ln_1p());
    let body = (1..p).map(move |k| {
        let kf = k as f64;
        4f64.ln() + ln_binomial(p, k) + kf * ln_2d + (pf - kf) * ln_1x + kf * ln_x
    });
    let last = (2.0 * pf).ln() + ln_sphere_volume(p) - ln_sphere_volume(p - 1) + pf * (ln_2d + ln_x);
    log_sum_exp(body.chain(std::iter::once(last)))
}

/// Logarithm of [`tail_bound`].
pub fn ln_tail_bound(params: &BoundParams, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(ln_tube_sum(params, 1.0 / t / params.sigma))
}

/// Upper bound on `Prob{C(z) ≥ t}` for `z` uniform in `B_P(a, σ)`, `t ≥ 1`.
///
/// May exceed 1, in which case it is vacuous.
pub fn tail_bound(params: &BoundParams, t: f64) -> Result<f64> {
    ln_tail_bound(params, t).map(f64::exp)
}

/// Logarithm of [`tube_ratio_bound`].
pub fn ln_tube_ratio_bound(params: &BoundParams, eps: f64) -> Result<f64> {
    check_unit("eps", eps)?;
    Ok(ln_tube_sum(params, eps / params.sigma))
}

/// Upper bound on `vol(T_P(W, ε) ∩ B_P(a, σ)) / vol B_P(a, σ)`.
///
/// Equal to `tail_bound(params, 1/ε)` bit for bit.
pub fn tube_ratio_bound(params: &BoundParams, eps: f64) -> Result<f64> {
    ln_tube_ratio_bound(params, eps).map(f64::exp)
}

/// `2 ln p + 2 ln d + 2 ln(1/σ) + 5.5`, an upper bound on `E ln C` over the cap.
pub fn expectation_bound(params: &BoundParams) -> Result<f64> {
    if params.p < 2 {
        return domain("the expectation bound needs p >= 2");
    }
    Ok(2.0 * (params.p as f64).ln() + 2.0 * params.ln_d() - 2.0 * params.sigma.ln() + 5.5)
}

/// Logarithm of [`smooth_tube_bound`].
pub fn ln_smooth_tube_bound(p: usize, d: u64, sigma: f64, eps: f64) -> Result<f64> {
    if p < 2 {
        return domain("the smooth tube bound needs p >= 2");
    }
    let params = BoundParams::new(p, d, sigma)?;
    check_unit("eps", eps)?;
    let pf = p as f64;
    let (ln_d, ln_e, ln_s) = (params.ln_d(), eps.ln(), sigma.ln());
    let lead = (4.0 / pf).ln() + ln_sphere_volume(p - 1);
    let body = (1..p).map(move |k| {
        let kf = k as f64;
        lead + ln_binomial(p, k) + kf * (ln_d + ln_e) + (pf - kf) * ln_s
    });
    let last = 2f64.ln() + ln_sphere_volume(p) + pf * (ln_d + ln_e);
    Ok(log_sum_exp(body.chain(std::iter::once(last))))
}

/// Absolute volume bound for the `ε`-tube of a smooth hypersurface patch
/// `V ∩ B_P(a, σ)` where `V` is cut out by one polynomial of degree `d`.
///
/// The underlying statement assumes `d` even; odd `d` is accepted for
/// exploratory comparison only.
pub fn smooth_tube_bound(p: usize, d: u64, sigma: f64, eps: f64) -> Result<f64> {
    ln_smooth_tube_bound(p, d, sigma, eps).map(f64::exp)
}

/// `2 C(p-1, i) O_{p-1} d^{i+1} σ^{p-i-1}`, bounding `|μ_i|(V ∩ B_P(a, σ))`.
pub fn curvature_integral_bound(p: usize, d: u64, sigma: f64, i: usize) -> Result<f64> {
    let params = BoundParams::new(p, d, sigma)?;
    if i >= p {
        return domain(format!("curvature index i={i} must be below p={p}"));
    }
    let ln = 2f64.ln()
        + ln_binomial(p - 1, i)
        + ln_sphere_volume(p - 1)
        + (i as f64 + 1.0) * params.ln_d()
        + (p - i - 1) as f64 * sigma.ln();
    Ok(ln.exp())
}

/// `O_{p-1} d^p`, bounding the integral of the absolute Gauss curvature.
pub fn gauss_curvature_bound(p: usize, d: u64) -> Result<f64> {
    let params = BoundParams::new(p, d, 1.0)?;
    Ok((ln_sphere_volume(p - 1) + p as f64 * params.ln_d()).exp())
}

/// Result of [`linear_tail_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearTail {
    Bound { value: f64 },
    /// `ε` exceeds `σ / ((1 + 2d)(p − 1))`.
    NotApplicable { threshold: f64 },
}

impl LinearTail {
    pub fn value(&self) -> Option<f64> {
        match *self {
            LinearTail::Bound { value } => Some(value),
            LinearTail::NotApplicable { .. } => None,
        }
    }
}

/// `(8e + 4) d p ε / σ`, a bound on `Prob{C ≥ 1/ε}` valid for
/// `ε ≤ σ / ((1 + 2d)(p − 1))`.
pub fn linear_tail_bound(p: usize, d: u64, sigma: f64, eps: f64) -> Result<LinearTail> {
    if p < 2 {
        return domain("the linear tail bound needs p >= 2");
    }
    let params = BoundParams::new(p, d, sigma)?;
    check_unit("eps", eps)?;
    let df = params.d as f64;
    let threshold = sigma / ((1.0 + 2.0 * df) * (p - 1) as f64);
    if eps > threshold {
        return Ok(LinearTail::NotApplicable { threshold });
    }
    let value = (8.0 * std::f64::consts::E + 4.0) * df * p as f64 * eps / sigma;
    Ok(LinearTail::Bound { value })
}

/// A numerical problem whose ill-posed set lies in a hypersurface of known degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemDescriptor {
    MatrixInversion { n: usize },
    MoorePenrose { l: usize, m: usize },
    EigenReal { n: usize },
    EigenComplex { n: usize },
    PolySys { degrees: Vec<u32> },
}

/// Which quantity [`application_bound`] returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    Tail { t: f64 },
    Expectation,
}

impl ProblemDescriptor {
    /// `(p, d)`: the input sphere `S^p` and the degree of a polynomial
    /// vanishing on the ill-posed set.
    pub fn dims(&self) -> Result<(usize, u64)> {
        let dims = match self {
            ProblemDescriptor::MatrixInversion { n } => {
                if *n < 2 {
                    return domain("matrix inversion needs n >= 2");
                }
                (n * n - 1, *n as u64)
            }
            ProblemDescriptor::MoorePenrose { l, m } => {
                if *m < 1 || l < m || l * m < 2 {
                    return domain(format!("Moore-Penrose needs l >= m >= 1 and l*m >= 2, got l={l}, m={m}"));
                }
                (l * m - 1, *m as u64)
            }
            ProblemDescriptor::EigenReal { n } => {
                if *n < 2 {
                    return domain("eigenvalue problems need n >= 2");
                }
                (n * n - 1, (n * n - n) as u64)
            }
            ProblemDescriptor::EigenComplex { n } => {
                if *n < 2 {
                    return domain("eigenvalue problems need n >= 2");
                }
                (2 * n * n - 1, (n * n - n) as u64)
            }
            ProblemDescriptor::PolySys { degrees } => {
                let n = degrees.len();
                if n == 0 || degrees.contains(&0) {
                    return domain("a polynomial system needs n >= 1 positive degrees");
                }
                let mut dim = 0f64;
                for &di in degrees {
                    dim += binomial(n + di as usize, n);
                }
                let bezout = self.bezout().expect("checked above");
                let d = 2.0 * n as f64 * bezout * bezout;
                if dim > 2f64.powi(52) || d > 2f64.powi(63) {
                    return domain("polynomial system too large for exact dimensions");
                }
                (dim as usize - 1, d as u64)
            }
        };
        Ok(dims)
    }

    /// Factor relating the condition number to the conic one `‖a‖/dist(a, W)`.
    ///
    /// Eigenvalue condition numbers are bounded by `√2` times the conic one.
    pub fn conic_scale(&self) -> f64 {
        match self {
            ProblemDescriptor::EigenReal { .. } | ProblemDescriptor::EigenComplex { .. } => {
                std::f64::consts::SQRT_2
            }
            _ => 1.0,
        }
    }

    fn bezout(&self) -> Option<f64> {
        match self {
            ProblemDescriptor::PolySys { degrees } => Some(degrees.iter().map(|&d| d as f64).product()),
            _ => None,
        }
    }
}

/// Tail or log-expectation bound for a concrete problem.
///
/// Tail mode bounds `Prob{κ ≥ t}` through the conic number, so eigenvalue
/// problems need `t ≥ √2`. Expectation mode returns the simplified
/// per-problem constants, each at least the generic bound at `(p, d)`.
pub fn application_bound(problem: &ProblemDescriptor, sigma: f64, mode: BoundMode) -> Result<f64> {
    let (p, d) = problem.dims()?;
    let params = BoundParams::new(p, d, sigma)?;
    match mode {
        BoundMode::Tail { t } => {
            check_t(t)?;
            let scale = problem.conic_scale();
            if t < scale {
                return domain(format!("t must be at least {scale} for this problem, got {t}"));
            }
            tail_bound(&params, t / scale)
        }
        BoundMode::Expectation => {
            let ln_inv_sigma = -sigma.ln();
            let value = match problem {
                ProblemDescriptor::MatrixInversion { n } => 6.0 * (*n as f64).ln() + 2.0 * ln_inv_sigma + 5.5,
                ProblemDescriptor::MoorePenrose { l, m } => {
                    2.0 * (*l as f64).ln() + 4.0 * (*m as f64).ln() + 2.0 * ln_inv_sigma + 5.5
                }
                ProblemDescriptor::EigenReal { n } => 8.0 * (*n as f64).ln() + 2.0 * ln_inv_sigma + 6.0,
                ProblemDescriptor::EigenComplex { n } => {
                    8.0 * (*n as f64).ln() + 2.0 * ln_inv_sigma + 6.0 + 2.0 * 2f64.ln()
                }
                ProblemDescriptor::PolySys { degrees } => {
                    let bezout = problem.bezout().expect("polynomial system");
                    2.0 * (p as f64).ln()
                        + 4.0 * bezout.ln()
                        + 2.0 * (degrees.len() as f64).ln()
                        + 2.0 * ln_inv_sigma
                        + 7.0
                }
            };
            Ok(value)
        }
    }
}
