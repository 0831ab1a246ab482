//! Condition numbers of matrix inversion, least squares, eigenvalue
//! computation and polynomial system solving, plus the Weyl-normed
//! polynomial algebra they need.
//!
//! Tolerances are relative to the norm of the input, never absolute.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sampling::RngStream;
use crate::sphere_geom::{euclidean_norm, SpherePoint};

/// `σ_min ≤ SINGULAR_TOLERANCE · ‖A‖_F` counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

/// Relative residual accepted for eigenvalues and zeros.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `|⟨x, y⟩| ≤ SIMPLE_TOLERANCE · ‖x‖‖y‖` marks a multiple eigenvalue.
pub const SIMPLE_TOLERANCE: f64 = 1e-12;

/// Relative `σ_min` below which a restricted derivative counts as singular.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-12;

/// Largest value returned by [`real_eigen_condition_lower`].
pub const CONDITION_CAP: f64 = 1e15;

/// Number of directions in the brute-force grid of [`discriminant_distance_2x2`].
pub const ORACLE_GRID: usize = 10_000;

fn check_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().any(|v| !v.is_finite()) {
        return domain("matrix entries must be finite");
    }
    Ok(())
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    check_finite(a)
}

/// Singular values in ascending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Ascending singular values and the right singular vector of the smallest.
///
/// Only right vectors are used: nalgebra's left vectors lose accuracy at
/// (near-)zero singular values.
fn smallest_right_singular(m: &DMatrix<f64>) -> (Vec<f64>, DVector<f64>) {
    let svd = m.clone().svd(false, true);
    let imin = svd.singular_values.imin();
    let v = svd.v_t.expect("requested").row(imin).transpose();
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    (s, v)
}

/// `κ_F(A) = ‖A‖_F / σ_min(A)`; infinite for numerically singular `A`.
pub fn frobenius_condition(a: &DMatrix<f64>) -> Result<f64> {
    check_square(a)?;
    let fro = a.norm();
    if fro == 0.0 {
        return domain("the zero matrix has no condition number");
    }
    let smin = singular_values(a)[0];
    Ok(if smin <= SINGULAR_TOLERANCE * fro { f64::INFINITY } else { fro / smin })
}

/// `κ†_F(A) = ‖A‖_F / σ_m(A)` for `ℓ × m` with `ℓ ≥ m`.
pub fn moore_penrose_condition(a: &DMatrix<f64>) -> Result<f64> {
    let (l, m) = a.shape();
    if l < m || m == 0 {
        return domain(format!("Moore-Penrose condition needs rows >= columns >= 1, got {l}x{m}"));
    }
    check_finite(a)?;
    let fro = a.norm();
    if fro == 0.0 {
        return domain("the zero matrix has no condition number");
    }
    let smin = singular_values(a)[0];
    Ok(if smin <= SINGULAR_TOLERANCE * fro { f64::INFINITY } else { fro / smin })
}

/// The rank-`n−1` SVD truncation of a square `A`: the nearest singular matrix.
pub fn nearest_singular_matrix(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    let (_, v) = smallest_right_singular(a);
    Ok(a - a * &v * v.transpose())
}

/// `κ(A, λ) = ‖x‖‖y‖ / |⟨x, y⟩|` for right and left eigenvectors of `λ`.
///
/// Both eigenvectors are the singular vectors of `A − λI` for its smallest
/// singular value. Infinite when `λ` is numerically multiple.
pub fn eigenvalue_condition(a: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    check_square(a)?;
    let n = a.nrows();
    let fro = a.norm();
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let (s, x) = smallest_right_singular(&shifted);
    let tolerance = RESIDUAL_TOLERANCE * fro;
    if s[0] > tolerance {
        return Err(Error::NotAnEigenvalue { residual: s[0], tolerance });
    }
    if n > 1 && s[1] <= tolerance {
        return Ok(f64::INFINITY);
    }
    let (_, y) = smallest_right_singular(&shifted.transpose());
    let c = x.dot(&y).abs();
    Ok(if c <= SIMPLE_TOLERANCE { f64::INFINITY } else { 1.0 / c })
}

/// `‖E‖²` for the smallest `E` such that `A + E` has eigenvalue `μ` with right
/// eigenvector `x` and left eigenvector `y`, minimized over `μ`, for
/// orthonormal `x, y`. Such `A + E` has `μ` as a multiple eigenvalue.
fn pair_defect(a: &DMatrix<f64>, at: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    // E = (r − c y) xᵀ + y sᵀ with r = (A − μ)x, s = (A − μ)ᵀy, c = yᵀAx;
    // the two rank-one parts are orthogonal, so ‖E‖² is a sum of squares.
    let ax = a * x;
    let aty = at * y;
    let mu = 0.5 * (x.dot(&ax) + y.dot(&aty));
    let c = y.dot(&ax);
    let r = ax - x * mu - y * c;
    let s = aty - y * mu;
    r.norm_squared() + s.norm_squared()
}

/// Gradient of [`pair_defect`] with respect to `x` and `y`.
fn pair_defect_gradient(
    a: &DMatrix<f64>,
    at: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let ax = a * x;
    let aty = at * y;
    let (ea, eb, ec) = (x.dot(&ax), y.dot(&aty), y.dot(&ax));
    let sum = ea + eb;
    let gx = at * &ax * 2.0 - (&ax + at * x) * sum - &aty * (2.0 * ec);
    let gy = a * &aty * 2.0 - (a * y + &aty) * sum - &ax * (2.0 * ec);
    (gx, gy)
}

/// Gram–Schmidt on two columns; `None` when they are dependent.
fn orthonormalize(x: DVector<f64>, y: DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let nx = x.norm();
    if nx < 1e-300 {
        return None;
    }
    let x = x / nx;
    let y = &y - &x * x.dot(&y);
    let ny = y.norm();
    if ny < 1e-12 {
        return None;
    }
    Some((x, y / ny))
}

fn random_orthonormal_pair(n: usize, rng: &mut RngStream) -> (DVector<f64>, DVector<f64>) {
    loop {
        let x = DVector::from_fn(n, |_, _| rng.standard_normal());
        let y = DVector::from_fn(n, |_, _| rng.standard_normal());
        if let Some(pair) = orthonormalize(x, y) {
            return pair;
        }
    }
}

/// Upper bound on the distance from `A` to the matrices with a real multiple
/// eigenvalue, by projected gradient descent over orthonormal eigenvector
/// pairs with random restarts.
///
/// Every evaluated pair yields an explicit matrix in that set, so the
/// result never falls below the true distance.
pub fn multiple_eigenvalue_distance_upper(
    a: &DMatrix<f64>,
    restarts: usize,
    iters: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    check_square(a)?;
    let n = a.nrows();
    if n < 2 {
        return domain("a multiple eigenvalue needs n >= 2");
    }
    let fro = a.norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    let a = a / fro;
    let at = a.transpose();
    // Singular-vector pairs of A − λ I at each eigenvalue's real part first,
    // then random pairs.
    let mut starts: Vec<(DVector<f64>, DVector<f64>)> = Vec::new();
    for lambda in a.complex_eigenvalues().iter() {
        let shifted = &a - DMatrix::identity(n, n) * lambda.re;
        let (_, x) = smallest_right_singular(&shifted);
        let (_, y) = smallest_right_singular(&shifted.transpose());
        if let Some(pair) = orthonormalize(x, y) {
            starts.push(pair);
        }
    }
    for _ in 0..restarts.max(1) {
        starts.push(random_orthonormal_pair(n, rng));
    }
    let mut best = f64::INFINITY;
    for (mut x, mut y) in starts {
        let mut value = pair_defect(&a, &at, &x, &y);
        let mut step = 0.25;
        for _ in 0..iters {
            let (gx, gy) = pair_defect_gradient(&a, &at, &x, &y);
            // Tangent projection on the Stiefel manifold: G − X sym(XᵀG).
            let (xgx, ygy) = (x.dot(&gx), y.dot(&gy));
            let cross = 0.5 * (x.dot(&gy) + y.dot(&gx));
            let tx = &gx - &x * xgx - &y * cross;
            let ty = &gy - &y * ygy - &x * cross;
            let slope = tx.norm_squared() + ty.norm_squared();
            if slope <= 1e-30 {
                break;
            }
            let mut accepted = false;
            while step > 1e-16 {
                if let Some((nx, ny)) = orthonormalize(&x - &tx * step, &y - &ty * step) {
                    let trial = pair_defect(&a, &at, &nx, &ny);
                    if trial <= value - 1e-4 * step * slope {
                        x = nx;
                        y = ny;
                        value = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step = (step * 2.0).min(4.0);
        }
        best = best.min(value);
    }
    Ok(best.sqrt() * fro)
}

/// Lower bound on `κ_eigen,ℝ(A) = √2 ‖A‖_F / dist(A, Σ)`, where `Σ` holds the
/// matrices with a real multiple eigenvalue. Capped at [`CONDITION_CAP`].
///
/// The distance is replaced by the upper estimate of
/// [`multiple_eigenvalue_distance_upper`], so the value can only understate
/// the condition number.
pub fn real_eigen_condition_lower(
    a: &DMatrix<f64>,
    restarts: usize,
    iters: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let fro = a.norm();
    if fro == 0.0 {
        return domain("the zero matrix has no condition number");
    }
    let dist = multiple_eigenvalue_distance_upper(a, restarts, iters, rng)?;
    let value = std::f64::consts::SQRT_2 * fro / dist;
    Ok(if value.is_finite() { value.min(CONDITION_CAP) } else { CONDITION_CAP })
}

/// Distance from a 2×2 matrix to the matrices with a real double eigenvalue,
/// by brute force.
///
/// That set is `{μI + s·w w⊥ᵀ}` with `w = (cos θ, sin θ)`. For fixed `θ` the
/// fit in `(μ, s)` is an orthogonal projection; `θ` is scanned on
/// [`ORACLE_GRID`] points and polished by Newton steps.
pub fn discriminant_distance_2x2(a: &[[f64; 2]; 2]) -> f64 {
    let fro2 = a.iter().flatten().map(|v| v * v).sum::<f64>();
    let tr = a[0][0] + a[1][1];
    let form = |u: [f64; 2], v: [f64; 2]| {
        u[0] * (a[0][0] * v[0] + a[0][1] * v[1]) + u[1] * (a[1][0] * v[0] + a[1][1] * v[1])
    };
    let frame = |theta: f64| {
        let (s, c) = theta.sin_cos();
        ([c, s], [-s, c])
    };
    // g(θ) = wᵀ A w⊥, the optimal s; only |g| matters.
    let g = |theta: f64| {
        let (w, wp) = frame(theta);
        form(w, wp)
    };
    let mut best_theta = 0.0;
    let mut best = 0.0f64;
    for k in 0..ORACLE_GRID {
        let theta = std::f64::consts::PI * k as f64 / ORACLE_GRID as f64;
        let v = g(theta).abs();
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    let mut theta = best_theta;
    for _ in 0..20 {
        let (w, wp) = frame(theta);
        let d1 = form(wp, wp) - form(w, w);
        let d2 = -2.0 * (form(w, wp) + form(wp, w));
        if d2 == 0.0 {
            break;
        }
        let next = theta - d1 / d2;
        let v = g(next).abs();
        if v < best {
            break;
        }
        best = v;
        theta = next;
    }
    (fro2 - 0.5 * tr * tr - best * best).max(0.0).sqrt()
}

/// Multinomial coefficient `|α|! / Π αᵢ!`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut total = 0u32;
    let mut acc = 1.0f64;
    for &a in alpha {
        for j in 1..=a {
            total += 1;
            acc = acc * total as f64 / j as f64;
        }
    }
    acc
}

/// A homogeneous polynomial of degree `d` in `X_0, …, X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylPolynomial {
    n: usize,
    degree: u32,
    coeffs: BTreeMap<Vec<u32>, f64>,
}

impl WeylPolynomial {
    pub fn zero(n: usize, degree: u32) -> Self {
        Self { n, degree, coeffs: BTreeMap::new() }
    }

    /// Builds a polynomial from `(α, a_α)` pairs; repeated indices add up.
    pub fn from_terms(n: usize, degree: u32, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut f = Self::zero(n, degree);
        for (alpha, coeff) in terms {
            if alpha.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, got: alpha.len() });
            }
            let sum: u32 = alpha.iter().sum();
            if sum != degree {
                return domain(format!("multi-index {alpha:?} sums to {sum}, expected degree {degree}"));
            }
            if !coeff.is_finite() {
                return domain("coefficients must be finite");
            }
            *f.coeffs.entry(alpha).or_insert(0.0) += coeff;
        }
        Ok(f)
    }

    /// The linear form `Σ cᵢ Xᵢ`.
    pub fn linear(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a linear form needs at least one variable");
        }
        let n = coeffs.len() - 1;
        Self::from_terms(
            n,
            1,
            coeffs.iter().enumerate().map(|(i, &c)| {
                let mut alpha = vec![0; n + 1];
                alpha[i] = 1;
                (alpha, c)
            }),
        )
    }

    /// `X_0^d` in `n + 1` variables.
    pub fn power_of_first(n: usize, degree: u32) -> Self {
        let mut alpha = vec![0; n + 1];
        alpha[0] = degree;
        Self::from_terms(n, degree, [(alpha, 1.0)]).expect("valid monomial")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.coeffs.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn coeff(&self, alpha: &[u32]) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: x.len() });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self
            .coeffs
            .iter()
            .map(|(alpha, c)| c * alpha.iter().zip(x).map(|(&a, xi)| xi.powi(a as i32)).product::<f64>())
            .sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut grad = vec![0.0; self.n + 1];
        for (alpha, c) in &self.coeffs {
            for (j, g) in grad.iter_mut().enumerate() {
                if alpha[j] == 0 {
                    continue;
                }
                let mut term = c * alpha[j] as f64;
                for (k, (&a, xk)) in alpha.iter().zip(x).enumerate() {
                    let power = if k == j { a - 1 } else { a };
                    term *= xk.powi(power as i32);
                }
                *g += term;
            }
        }
        Ok(grad)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: other.n + 1 });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n, self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let alpha: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *out.coeffs.entry(alpha).or_insert(0.0) += ca * cb;
            }
        }
        Ok(out)
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return domain(format!("degree mismatch: {} vs {}", self.degree, other.degree));
        }
        let mut out = self.clone();
        for (alpha, c) in &other.coeffs {
            *out.coeffs.entry(alpha.clone()).or_insert(0.0) += factor * c;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c *= factor);
        out
    }

    /// `self^k` (`self^0 = 1`).
    pub fn power(&self, k: u32) -> Self {
        let mut one = Self::zero(self.n, 0);
        one.coeffs.insert(vec![0; self.n + 1], 1.0);
        (0..k).fold(one, |acc, _| acc.multiply(self).expect("same variables"))
    }

    /// `x ↦ f(M x)` by expanding every monomial in the linear forms `(M x)_i`.
    pub fn compose_linear(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.n + 1 || m.ncols() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: m.nrows() });
        }
        let rows: Vec<Self> = (0..=self.n)
            .map(|i| Self::linear(&m.row(i).iter().copied().collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(self.n, self.degree);
        for (alpha, c) in &self.coeffs {
            let mut term = Self::zero(self.n, 0);
            term.coeffs.insert(vec![0; self.n + 1], *c);
            for (i, &a) in alpha.iter().enumerate() {
                term = term.multiply(&rows[i].power(a))?;
            }
            out = out.add_scaled(&term, 1.0)?;
        }
        Ok(out)
    }
}

/// Weyl inner product `Σ_α C(d, α)^{-1} a_α b_α`.
pub fn weyl_inner(f: &WeylPolynomial, g: &WeylPolynomial) -> Result<f64> {
    f.check_compatible(g)?;
    if f.degree != g.degree {
        return domain(format!("degree mismatch: {} vs {}", f.degree, g.degree));
    }
    Ok(f.coeffs
        .iter()
        .filter_map(|(alpha, a)| g.coeffs.get(alpha).map(|b| a * b / multinomial(alpha)))
        .sum())
}

pub fn weyl_norm(f: &WeylPolynomial) -> f64 {
    weyl_inner(f, f).expect("self-compatible").max(0.0).sqrt()
}

/// A square system `f = (f_1, …, f_n)` of homogeneous polynomials in `n + 1` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    polys: Vec<WeylPolynomial>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    alpha: Vec<u32>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PolySystemFile {
    n: usize,
    degrees: Vec<u32>,
    polys: Vec<Vec<TermFile>>,
}

impl PolySystem {
    pub fn new(polys: Vec<WeylPolynomial>) -> Result<Self> {
        let n = polys.len();
        if n == 0 {
            return domain("a system needs at least one polynomial");
        }
        if let Some(bad) = polys.iter().find(|f| f.n != n) {
            return Err(Error::DimensionMismatch { expected: n + 1, got: bad.n + 1 });
        }
        Ok(Self { polys })
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|f| f.degree).collect()
    }

    pub fn polys(&self) -> &[WeylPolynomial] {
        &self.polys
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.polys.iter().map(|f| f.eval(x)).collect()
    }

    /// `n × (n+1)` Jacobian at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.n();
        let mut jac = DMatrix::zeros(n, n + 1);
        for (i, f) in self.polys.iter().enumerate() {
            for (j, g) in f.gradient(x)?.into_iter().enumerate() {
                jac[(i, j)] = g;
            }
        }
        Ok(jac)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { polys: self.polys.iter().map(|f| f.scaled(factor)).collect() }
    }

    /// `self + factor · other`, componentwise.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        if self.degrees() != other.degrees() {
            return domain("systems have different degree patterns");
        }
        let polys = self.polys.iter().zip(&other.polys).map(|(f, g)| f.add_scaled(g, factor)).collect::<Result<_>>()?;
        Ok(Self { polys })
    }

    /// `x ↦ f(M x)`.
    pub fn compose_linear(&self, m: &DMatrix<f64>) -> Result<Self> {
        let polys = self.polys.iter().map(|f| f.compose_linear(m)).collect::<Result<_>>()?;
        Ok(Self { polys })
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = system_norm(self);
        if norm == 0.0 {
            return domain("the zero system cannot be normalized");
        }
        Ok(self.scaled(1.0 / norm))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: PolySystemFile = serde_json::from_str(text)?;
        if file.degrees.len() != file.n || file.polys.len() != file.n {
            return domain(format!(
                "declared n={} but found {} degrees and {} polynomials",
                file.n,
                file.degrees.len(),
                file.polys.len()
            ));
        }
        let polys = file
            .polys
            .into_iter()
            .zip(&file.degrees)
            .map(|(terms, &d)| WeylPolynomial::from_terms(file.n, d, terms.into_iter().map(|t| (t.alpha, t.coeff))))
            .collect::<Result<_>>()?;
        Self::new(polys)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = PolySystemFile {
            n: self.n(),
            degrees: self.degrees(),
            polys: self
                .polys
                .iter()
                .map(|f| f.terms().map(|(a, c)| TermFile { alpha: a.to_vec(), coeff: c }).collect())
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Weyl inner product of systems, summed over components.
pub fn system_inner(f: &PolySystem, g: &PolySystem) -> Result<f64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: g.n() });
    }
    f.polys.iter().zip(&g.polys).map(|(a, b)| weyl_inner(a, b)).sum()
}

pub fn system_norm(f: &PolySystem) -> f64 {
    f.polys.iter().map(|p| weyl_inner(p, p).expect("self-compatible")).sum::<f64>().max(0.0).sqrt()
}

/// `d_P(f, g)`: sine of the angle between two nonzero systems.
pub fn system_projective_distance(f: &PolySystem, g: &PolySystem) -> Result<f64> {
    let (nf, ng) = (system_norm(f), system_norm(g));
    if nf == 0.0 || ng == 0.0 {
        return domain("projective distance needs nonzero systems");
    }
    let c = system_inner(f, g)? / (nf * ng);
    let rejection = g.scaled(1.0 / ng).add_scaled(f, -c / nf)?;
    Ok(system_norm(&rejection).min(1.0))
}

/// Orthonormal basis of `ζ^⊥` as the columns of an `(n+1) × n` matrix,
/// taken from the Householder reflection sending `ζ` to a multiple of `e_0`.
fn tangent_basis(zeta: &[f64]) -> DMatrix<f64> {
    let m = zeta.len();
    let mut v = DVector::from_column_slice(zeta);
    v[0] += if zeta[0] >= 0.0 { 1.0 } else { -1.0 };
    let h = DMatrix::identity(m, m) - &v * v.transpose() * (2.0 / v.norm_squared());
    h.columns(1, m - 1).into_owned()
}

/// `Δ^{-1} Df(ζ)|_{ζ^⊥}` in the basis of [`tangent_basis`], `Δ = diag(√dᵢ)`.
fn scaled_restricted_derivative(f: &PolySystem, zeta: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let basis = tangent_basis(zeta);
    let mut r = f.jacobian(zeta)? * &basis;
    for (i, d) in f.degrees().into_iter().enumerate() {
        r.row_mut(i).scale_mut(1.0 / (d as f64).sqrt());
    }
    Ok((r, basis))
}

fn check_zero(f: &PolySystem, zeta: &SpherePoint, norm: f64) -> Result<()> {
    if zeta.coords().len() != f.n() + 1 {
        return Err(Error::DimensionMismatch { expected: f.n() + 1, got: zeta.coords().len() });
    }
    let residual = euclidean_norm(&f.eval(zeta.coords())?);
    let tolerance = RESIDUAL_TOLERANCE * norm;
    if residual > tolerance {
        return Err(Error::NotAZero { residual, tolerance });
    }
    Ok(())
}

/// `μ_norm(f, ζ) = ‖f‖ · ‖(Df(ζ)|_{ζ^⊥})^{-1} diag(√dᵢ)‖`; infinite at a
/// multiple zero.
pub fn mu_norm(f: &PolySystem, zeta: &SpherePoint) -> Result<f64> {
    let norm = system_norm(f);
    if norm == 0.0 {
        return domain("the zero system has no condition number");
    }
    check_zero(f, zeta, norm)?;
    let (r, _) = scaled_restricted_derivative(f, zeta.coords())?;
    let smin = singular_values(&r)[0];
    Ok(if smin <= DERIVATIVE_TOLERANCE * norm { f64::INFINITY } else { norm / smin })
}

/// `max_ζ μ_norm(f, ζ)` over the given zeros: a lower bound on the real
/// condition number `μ_norm,ℝ(f)`, and on `cond(f)` for zero counting.
pub fn mu_norm_real_lower(f: &PolySystem, zeros: &[SpherePoint]) -> Result<f64> {
    if zeros.is_empty() {
        return domain("at least one zero is required");
    }
    zeros.iter().try_fold(0.0f64, |acc, z| Ok(acc.max(mu_norm(f, z)?)))
}

/// Nearest system to `f` having `ζ` as a multiple zero.
///
/// With `Δ^{-1} R = U Σ Vᵀ` the scaled restricted derivative, subtracts
/// `hᵢ = ⟨X, ζ⟩^{dᵢ−1} ℓᵢ(X)` where `ℓᵢ` has gradient `√dᵢ σ_n uᵢ B v` and
/// `B` spans `ζ^⊥`. Then `‖h‖ = σ_n` and `h ⟂ f − h`.
pub fn singular_witness(f: &PolySystem, zeta: &SpherePoint) -> Result<PolySystem> {
    let norm = system_norm(f);
    if norm == 0.0 {
        return domain("the zero system has no witness");
    }
    check_zero(f, zeta, norm)?;
    let (r, basis) = scaled_restricted_derivative(f, zeta.coords())?;
    let (s, v) = smallest_right_singular(&r);
    let sigma = s[0];
    if sigma <= DERIVATIVE_TOLERANCE * norm {
        return Ok(f.clone());
    }
    let u = &r * &v / sigma;
    let direction: Vec<f64> = (basis * v).iter().copied().collect();
    let along = WeylPolynomial::linear(zeta.coords())?;
    let mut polys = Vec::with_capacity(f.n());
    for (i, fi) in f.polys.iter().enumerate() {
        let d = fi.degree;
        let scale = (d as f64).sqrt() * sigma * u[i];
        let ell = WeylPolynomial::linear(&direction.iter().map(|c| c * scale).collect::<Vec<_>>())?;
        let h = along.power(d - 1).multiply(&ell)?;
        polys.push(fi.add_scaled(&h, -1.0)?);
    }
    PolySystem::new(polys)
}

/// Checks `μ_norm(f, ζ) · d_P(f, g) ≥ 1 − 10⁻⁶` for a witness `g` having `ζ`
/// as a multiple zero. An infinite `μ_norm` passes.
pub fn cntr_witness_check(f: &PolySystem, zeta: &SpherePoint, g: &PolySystem) -> Result<bool> {
    for (name, sys) in [("f", f), ("g", g)] {
        let norm = system_norm(sys);
        if (norm - 1.0).abs() > RESIDUAL_TOLERANCE {
            return domain(format!("{name} must have unit Weyl norm, got {norm}"));
        }
    }
    check_zero(g, zeta, 1.0)?;
    let (r, _) = scaled_restricted_derivative(g, zeta.coords())?;
    let smin = singular_values(&r)[0];
    if smin > RESIDUAL_TOLERANCE {
        return domain(format!("zeta is not a multiple zero of g (sigma_min = {smin:e})"));
    }
    let mu = mu_norm(f, zeta)?;
    if mu.is_infinite() {
        return Ok(true);
    }
    Ok(mu * system_projective_distance(f, g)? >= 1.0 - 1e-6)
}

/// All multi-indices of length `n + 1` summing to `d`, in lexicographic order.
pub fn multi_indices(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, d: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            rec(prefix, left - 1, d - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n + 1, d, &mut out);
    out
}

/// Random system with coefficients `a_α ~ N(0, C(d, α))`, a distribution
/// invariant under orthogonal changes of variables.
pub fn random_system(n: usize, degrees: &[u32], rng: &mut RngStream) -> Result<PolySystem> {
    if degrees.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: degrees.len() });
    }
    let polys = degrees
        .iter()
        .map(|&d| {
            let terms: Vec<_> = multi_indices(n, d)
                .into_iter()
                .map(|alpha| {
                    let sd = multinomial(&alpha).sqrt();
                    (alpha, sd * rng.standard_normal())
                })
                .collect();
            WeylPolynomial::from_terms(n, d, terms)
        })
        .collect::<Result<_>>()?;
    PolySystem::new(polys)
}

/// `fᵢ − fᵢ(ζ) ⟨X, ζ⟩^{dᵢ}`: the same system shifted to vanish at `ζ`.
pub fn with_zero_at(f: &PolySystem, zeta: &SpherePoint) -> Result<PolySystem> {
    let along = WeylPolynomial::linear(zeta.coords())?;
    let values = f.eval(zeta.coords())?;
    let polys = f
        .polys
        .iter()
        .zip(values)
        .map(|(fi, v)| fi.add_scaled(&along.power(fi.degree), -v))
        .collect::<Result<_>>()?;
    PolySystem::new(polys)
}
