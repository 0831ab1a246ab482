//! Exact spherical geometry on `S^p ⊂ R^{p+1}`.
//!
//! Volumes are expressed through the sphere volumes `O_p` and the
//! trigonometric moment integrals
//! `J_{p,k}(α) = ∫_0^α sin^{k-1}ρ · cos^{p-k}ρ dρ`.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::quadrature;

/// Unit-norm tolerance accepted by [`SpherePoint::new`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the quadrature cross-check for `J_{p,k}`.
pub const J_QUADRATURE_TOLERANCE: f64 = 1e-12;

/// A point of the unit sphere `S^p`, stored as `p + 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps coordinates that already have unit norm (within [`UNIT_TOLERANCE`]).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return domain("a sphere point needs at least two coordinates (p >= 1)");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        let norm = euclidean_norm(&coords);
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return domain(format!("coordinates have norm {norm}, expected 1"));
        }
        Ok(Self { coords })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn from_vector(mut coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return domain("a sphere point needs at least two coordinates (p >= 1)");
        }
        let norm = euclidean_norm(&coords);
        if !norm.is_finite() || norm == 0.0 {
            return domain("cannot normalize a zero or non-finite vector");
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coords })
    }

    /// The pole `e_index` of `S^p`.
    pub fn pole(p: usize, index: usize) -> Result<Self> {
        if p == 0 || index > p {
            return domain(format!("pole e_{index} does not exist on S^{p}"));
        }
        let mut coords = vec![0.0; p + 1];
        coords[index] = 1.0;
        Ok(Self { coords })
    }

    /// The first coordinate pole `e_0`.
    pub fn north(p: usize) -> Result<Self> {
        Self::pole(p, 0)
    }

    /// Sphere dimension `p`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(dot(&self.coords, &other.coords))
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

/// A spherical cap `B_P(a, σ)`: the open geodesic ball of angular radius
/// `arcsin σ` around `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    center: SpherePoint,
    sigma: f64,
}

impl Cap {
    pub fn new(center: SpherePoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return domain(format!("cap radius sigma must lie in (0, 1], got {sigma}"));
        }
        Ok(Self { center, sigma })
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Angular radius `arcsin σ ∈ (0, π/2]`.
    pub fn angular_radius(&self) -> f64 {
        self.sigma.asin()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    // Scaled to survive very large or very small entries.
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

fn check_same_dim(x: &SpherePoint, y: &SpherePoint) -> Result<()> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch { expected: x.coords.len(), got: y.coords.len() });
    }
    Ok(())
}

/// `ln O_p` where `O_p = 2π^{(p+1)/2} / Γ((p+1)/2)`.
pub fn ln_sphere_volume(p: usize) -> f64 {
    let h = (p as f64 + 1.0) / 2.0;
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)
}

/// The `p`-dimensional volume `O_p` of the unit sphere `S^p`.
pub fn sphere_volume(p: usize) -> f64 {
    match p {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => ln_sphere_volume(p).exp(),
    }
}

/// `ln binom(n, k)` via log-Gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `binom(n, k)` as a float; exact for moderate arguments.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut acc = 1.0f64;
        for j in 0..k {
            acc = acc * (n - j) as f64 / (j + 1) as f64;
        }
        return acc.round();
    }
    ln_binomial(n, k).exp()
}

fn check_j_args(p: usize, k: usize, alpha: f64) -> Result<()> {
    if p == 0 || k == 0 || k > p {
        return domain(format!("J_{{p,k}} needs 1 <= k <= p, got p={p}, k={k}"));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return domain(format!("J_{{p,k}} needs alpha in [0, pi/2], got {alpha}"));
    }
    Ok(())
}

/// `J_{p,k}(α)` by the integration-by-parts recurrence on trigonometric powers.
pub fn j_integral(p: usize, k: usize, alpha: f64) -> Result<f64> {
    check_j_args(p, k, alpha)?;
    Ok(trig_moment(k - 1, p - k, alpha))
}

/// `J_{p,k}(α)` by adaptive Gauss–Kronrod quadrature; cross-check for [`j_integral`].
pub fn j_integral_quadrature(p: usize, k: usize, alpha: f64) -> Result<f64> {
    check_j_args(p, k, alpha)?;
    let (m, n) = ((k - 1) as i32, (p - k) as i32);
    Ok(quadrature::integrate(
        |r| r.sin().powi(m) * r.cos().powi(n),
        0.0,
        alpha,
        J_QUADRATURE_TOLERANCE,
    ))
}

/// `∫_0^α sin^m ρ cos^n ρ dρ` for `0 ≤ α ≤ π/2`.
///
/// The cosine power is lowered first; every term of that recurrence is
/// positive.
pub(crate) fn trig_moment(m: usize, n: usize, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let (s, c) = alpha.sin_cos();
    let c = c.max(0.0);
    let sm1 = s.powi(m as i32 + 1);
    let (mut value, start) = if n % 2 == 1 {
        (sm1 / (m as f64 + 1.0), 1)
    } else {
        (sin_power_integral(m, alpha), 0)
    };
    let mut nn = start + 2;
    while nn <= n {
        let denom = (m + nn) as f64;
        value = sm1 * c.powi(nn as i32 - 1) / denom + (nn as f64 - 1.0) / denom * value;
        nn += 2;
    }
    value
}

/// `∫_0^β cos^m φ dφ` for `β ∈ [0, π/2]` given `(sin β, cos β)`; positive recurrence.
fn cos_power_integral(m: usize, beta: f64, sb: f64, cb: f64) -> f64 {
    let mut value = if m.is_multiple_of(2) { beta } else { sb };
    let mut mm = m % 2 + 2;
    while mm <= m {
        let mf = mm as f64;
        value = cb.powi(mm as i32 - 1) * sb / mf + (mf - 1.0) / mf * value;
        mm += 2;
    }
    value
}

/// `∫_0^α sin^m ρ dρ`.
///
/// Above the median of `sin^m` this is the Wallis integral minus a cosine
/// tail; below it, the positive series
/// `Σ_j (1/2)_j / j! · s^{m+1+2j} / (m+1+2j)` with `s = sin α`.
fn sin_power_integral(m: usize, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let c = c.max(0.0);
    if m == 0 {
        return alpha;
    }
    if m == 1 {
        return 2.0 * (0.5 * alpha).sin().powi(2);
    }
    let full = cos_power_integral(m, FRAC_PI_2, 1.0, 0.0);
    let tail = cos_power_integral(m, FRAC_PI_2 - alpha, c, s);
    if tail <= 0.5 * full {
        return full - tail;
    }
    let s2 = s * s;
    let mut term = s.powi(m as i32 + 1);
    let mut sum = term / (m as f64 + 1.0);
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        term *= (jf + 0.5) / (jf + 1.0) * s2;
        j += 1;
        let add = term / (m as f64 + 1.0 + 2.0 * j as f64);
        sum += add;
        // Later terms shrink at least geometrically with ratio s².
        if add <= 1e-17 * sum * (1.0 - s2) || term == 0.0 {
            return sum;
        }
    }
}

/// `vol_p B_R(a, α) = O_{p-1} · J_{p,p}(α)` for `0 < α ≤ π/2`.
pub fn ball_volume(p: usize, alpha: f64) -> Result<f64> {
    if p == 0 {
        return domain("ball_volume needs p >= 1");
    }
    if !(alpha > 0.0 && alpha <= FRAC_PI_2) {
        return domain(format!("ball_volume needs alpha in (0, pi/2], got {alpha}"));
    }
    Ok(sphere_volume(p - 1) * trig_moment(p - 1, 0, alpha))
}

/// Volume of a geodesic ball of any radius `θ ∈ [0, π]`, using
/// `vol B_R(q, θ) = O_p − vol B_R(q, π − θ)` beyond the hemisphere.
pub fn geodesic_ball_volume(p: usize, theta: f64) -> Result<f64> {
    if p == 0 {
        return domain("geodesic_ball_volume needs p >= 1");
    }
    if !(0.0..=PI).contains(&theta) {
        return domain(format!("ball radius must lie in [0, pi], got {theta}"));
    }
    let half = |a: f64| sphere_volume(p - 1) * trig_moment(p - 1, 0, a);
    Ok(if theta <= FRAC_PI_2 { half(theta) } else { sphere_volume(p) - half(PI - theta) })
}

/// `vol_p T_P(S^{p-k}, ε) = O_{p-k} · O_{k-1} · J_{p,k}(arcsin ε)`.
pub fn subsphere_tube_volume(p: usize, k: usize, eps: f64) -> Result<f64> {
    if p == 0 || k == 0 || k > p {
        return domain(format!("subsphere tube needs 1 <= k <= p, got p={p}, k={k}"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return domain(format!("tube radius eps must lie in (0, 1], got {eps}"));
    }
    Ok(sphere_volume(p - k) * sphere_volume(k - 1) * trig_moment(k - 1, p - k, eps.asin()))
}

/// Kinematic constant
/// `C(p,i) = (p-i-1)·binom(p-1,i)·O_{p-1}O_p / (O_i O_{i+1} O_{p-i-2})`.
pub fn kinematic_constant(p: usize, i: usize) -> Result<f64> {
    if p < 2 || i + 1 >= p {
        return domain(format!("C(p,i) needs p >= 2 and 0 <= i < p-1, got p={p}, i={i}"));
    }
    let ln = ((p - i - 1) as f64).ln()
        + ln_binomial(p - 1, i)
        + ln_sphere_volume(p - 1)
        + ln_sphere_volume(p)
        - ln_sphere_volume(i)
        - ln_sphere_volume(i + 1)
        - ln_sphere_volume(p - i - 2);
    Ok(ln.exp())
}

/// Angular distance `d_R(x, y) ∈ [0, π]`.
pub fn riemannian_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_same_dim(x, y)?;
    let (s, c) = sin_cos_between(&x.coords, &y.coords);
    Ok(s.atan2(c))
}

/// Projective distance `d_P(x, y) = sin d_R(x, y) ∈ [0, 1]`.
pub fn projective_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_same_dim(x, y)?;
    Ok(sin_cos_between(&x.coords, &y.coords).0)
}

/// `(sin θ, cos θ)` of the angle between two unit vectors, with the sine
/// taken from the rejection `y − ⟨x,y⟩x` so it stays accurate near 0 and π.
pub(crate) fn sin_cos_between(x: &[f64], y: &[f64]) -> (f64, f64) {
    let c = dot(x, y).clamp(-1.0, 1.0);
    let rejection: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - c * a).collect();
    (euclidean_norm(&rejection).min(1.0), c)
}

/// `d_P(x, S^m)` for the coordinate subsphere `S^m = {x_{m+1} = … = x_p = 0}`:
/// the norm of the trailing `p − m` coordinates.
pub fn distance_to_subsphere(x: &SpherePoint, m: usize) -> Result<f64> {
    let p = x.dim();
    if m >= p {
        return domain(format!("subsphere S^{m} must have m <= p-1 = {}", p - 1));
    }
    Ok(euclidean_norm(&x.coords[m + 1..]).min(1.0))
}
