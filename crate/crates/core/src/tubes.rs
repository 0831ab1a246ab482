//! Ill-posed sets on spheres, their `ε`-neighborhoods inside caps, and the
//! curvature identities for geodesic spheres.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::condition::{multi_indices, multinomial, singular_values, weyl_norm, WeylPolynomial};
use crate::error::{domain, Error, Result};
use crate::mc::{run_blocks, McConfig, McEstimate};
use crate::sampling::{sample_uniform_cap, sample_uniform_sphere, RngStream};
use crate::sphere_geom::{
    binomial, distance_to_subsphere, dot, euclidean_norm, geodesic_ball_volume, j_integral, kinematic_constant,
    sin_cos_between, sphere_volume, Cap, SpherePoint,
};

/// Great circles per family in a curve mesh.
pub const CURVE_CIRCLES: usize = 256;

/// Samples along each great circle of a curve mesh.
pub const CURVE_MESH: usize = 4096;

/// Newton steps polishing the nearest mesh point.
pub const CURVE_NEWTON_STEPS: usize = 2;

/// A refined point counts as on the curve when `|f(q)| ≤ tol · ‖∇_S f(q)‖`.
pub const CURVE_ON_TOLERANCE: f64 = 1e-10;

/// Zero set on `S²` of one homogeneous polynomial in `X_0, X_1, X_2`, with
/// a precomputed mesh of points on it.
#[derive(Debug, Clone)]
pub struct Curve {
    poly: WeylPolynomial,
    mesh: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct MonomialFile {
    alpha: [u32; 3],
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    p: usize,
    degree: u32,
    monomials: Vec<MonomialFile>,
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = euclidean_norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

impl Curve {
    /// Meshes the zero set: two families of [`CURVE_CIRCLES`] great circles
    /// (through `±e_2` and through `±e_0`), each sampled at [`CURVE_MESH`]
    /// angles, with every sign change refined by bisection.
    pub fn new(poly: WeylPolynomial) -> Result<Self> {
        if poly.n() != 2 {
            return Err(Error::DimensionMismatch { expected: 3, got: poly.n() + 1 });
        }
        if poly.degree() == 0 {
            return domain("a curve needs positive degree");
        }
        if weyl_norm(&poly) == 0.0 {
            return domain("the zero polynomial does not define a curve");
        }
        let f = |x: [f64; 3]| poly.eval(&x).expect("three coordinates");
        let mut mesh = Vec::new();
        for family in 0..2 {
            for k in 0..CURVE_CIRCLES {
                let phi = PI * k as f64 / CURVE_CIRCLES as f64;
                let (sp, cp) = phi.sin_cos();
                // Orthonormal frame (u, w) of the circle.
                let (u, w) = if family == 0 { ([cp, sp, 0.0], [0.0, 0.0, 1.0]) } else { ([0.0, cp, sp], [1.0, 0.0, 0.0]) };
                let at = |t: f64| {
                    let (s, c) = t.sin_cos();
                    [c * u[0] + s * w[0], c * u[1] + s * w[1], c * u[2] + s * w[2]]
                };
                let step = 2.0 * PI / CURVE_MESH as f64;
                let mut prev_t = 0.0;
                let mut prev_v = f(at(0.0));
                for j in 1..=CURVE_MESH {
                    let t = step * j as f64;
                    let v = f(at(t));
                    if v == 0.0 {
                        mesh.push(normalize3(at(t)));
                    } else if prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
                        let (mut lo, mut hi, mut flo) = (prev_t, t, prev_v);
                        for _ in 0..60 {
                            let mid = 0.5 * (lo + hi);
                            let fm = f(at(mid));
                            if (fm < 0.0) == (flo < 0.0) {
                                lo = mid;
                                flo = fm;
                            } else {
                                hi = mid;
                            }
                        }
                        mesh.push(normalize3(at(0.5 * (lo + hi))));
                    }
                    prev_t = t;
                    prev_v = v;
                }
            }
        }
        Ok(Self { poly, mesh })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: CurveFile = serde_json::from_str(text)?;
        if file.p != 2 {
            return domain(format!("curve files describe curves on S^2, got p={}", file.p));
        }
        let poly =
            WeylPolynomial::from_terms(2, file.degree, file.monomials.into_iter().map(|m| (m.alpha.to_vec(), m.coeff)))?;
        Self::new(poly)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = CurveFile {
            p: 2,
            degree: self.poly.degree(),
            monomials: self
                .poly
                .terms()
                .map(|(a, c)| MonomialFile { alpha: [a[0], a[1], a[2]], coeff: c })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn poly(&self) -> &WeylPolynomial {
        &self.poly
    }

    pub fn mesh(&self) -> &[[f64; 3]] {
        &self.mesh
    }

    /// Angle between neighboring circles of a mesh family.
    pub fn mesh_resolution(&self) -> f64 {
        PI / CURVE_CIRCLES as f64
    }

    /// Spherical gradient `∇f(q) − ⟨∇f(q), q⟩ q`.
    fn spherical_gradient(&self, q: &[f64; 3]) -> [f64; 3] {
        let g = self.poly.gradient(q).expect("three coordinates");
        let c = dot(&g, q);
        [g[0] - c * q[0], g[1] - c * q[1], g[2] - c * q[2]]
    }

    /// Newton steps along the spherical gradient back onto `f = 0`;
    /// `None` unless the result passes the on-curve test.
    fn project_to_curve(&self, mut q: [f64; 3]) -> Option<[f64; 3]> {
        for _ in 0..8 {
            let v = self.poly.eval(&q).expect("three coordinates");
            let g = self.spherical_gradient(&q);
            let g2 = dot(&g, &g);
            if g2 == 0.0 {
                return None;
            }
            if v.abs() <= CURVE_ON_TOLERANCE * g2.sqrt() {
                return Some(q);
            }
            q = normalize3([q[0] - v * g[0] / g2, q[1] - v * g[1] / g2, q[2] - v * g[2] / g2]);
        }
        let v = self.poly.eval(&q).expect("three coordinates");
        (v.abs() <= CURVE_ON_TOLERANCE * euclidean_norm(&self.spherical_gradient(&q))).then_some(q)
    }

    /// `d_P(x, curve)`: nearest mesh point, then [`CURVE_NEWTON_STEPS`] steps
    /// that slide along the curve toward `x` and return onto it. A step is
    /// kept only if its point lies on the curve and is closer, so the value
    /// is attained at a point within the on-curve tolerance of the curve.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: x.len() });
        }
        if self.mesh.is_empty() {
            return Ok(1.0);
        }
        let mut best = self.mesh[0];
        let mut best_c = 0.0f64;
        for q in &self.mesh {
            let c = dot(x, q).abs();
            if c > best_c {
                best_c = c;
                best = *q;
            }
        }
        if dot(x, &best) < 0.0 {
            best = [-best[0], -best[1], -best[2]];
        }
        let mut best_d = sin_cos_between(x, &best).0;
        for _ in 0..CURVE_NEWTON_STEPS {
            let g = self.spherical_gradient(&best);
            // Tangent of the curve at `best`.
            let t = [
                best[1] * g[2] - best[2] * g[1],
                best[2] * g[0] - best[0] * g[2],
                best[0] * g[1] - best[1] * g[0],
            ];
            let tn = euclidean_norm(&t);
            if tn == 0.0 {
                break;
            }
            let t = [t[0] / tn, t[1] / tn, t[2] / tn];
            let theta = dot(x, &t).atan2(dot(x, &best));
            let (s, c) = theta.sin_cos();
            let moved = normalize3([c * best[0] + s * t[0], c * best[1] + s * t[1], c * best[2] + s * t[2]]);
            let Some(q) = self.project_to_curve(moved) else { break };
            let d = sin_cos_between(x, &q).0;
            if d >= best_d {
                break;
            }
            best_d = d;
            best = if dot(x, &q) < 0.0 { [-q[0], -q[1], -q[2]] } else { q };
        }
        Ok(best_d)
    }
}

/// Random curve with coefficients `a_α ~ N(0, C(d, α))`; redrawn until its
/// zero set on `S²` is nonempty.
pub fn random_curve(degree: u32, rng: &mut RngStream) -> Result<Curve> {
    if degree == 0 {
        return domain("a curve needs positive degree");
    }
    loop {
        let terms: Vec<_> = multi_indices(2, degree)
            .into_iter()
            .map(|alpha| {
                let sd = multinomial(&alpha).sqrt();
                (alpha, sd * rng.standard_normal())
            })
            .collect();
        let curve = Curve::new(WeylPolynomial::from_terms(2, degree, terms)?)?;
        if !curve.mesh.is_empty() {
            return Ok(curve);
        }
    }
}

/// An ill-posed set `W ⊂ S^p` with a projective distance oracle.
#[derive(Debug, Clone)]
pub enum Variety {
    /// `S^m = {x_{m+1} = … = x_p = 0}` in `S^p`.
    Subsphere { p: usize, m: usize },
    /// Singular `n × n` matrices, read row-major from `S^{n²−1}`.
    Determinant { n: usize },
    Curve(Curve),
    Union(Vec<Variety>),
}

impl Variety {
    pub fn dim(&self) -> Result<usize> {
        match self {
            Variety::Subsphere { p, .. } => Ok(*p),
            Variety::Determinant { n } => Ok(n * n - 1),
            Variety::Curve(_) => Ok(2),
            Variety::Union(members) => {
                let first = members.first().ok_or_else(|| Error::Invalid("empty union".into()))?.dim()?;
                for v in members {
                    if v.dim()? != first {
                        return Err(Error::DimensionMismatch { expected: first, got: v.dim()? });
                    }
                }
                Ok(first)
            }
        }
    }

    /// Degree bound for polynomials cutting out the set.
    ///
    /// A union is cut out by products of member equations, so its degree is
    /// the sum of member degrees.
    pub fn degree(&self) -> u64 {
        match self {
            Variety::Subsphere { .. } => 1,
            Variety::Determinant { n } => *n as u64,
            Variety::Curve(c) => c.poly.degree() as u64,
            Variety::Union(members) => members.iter().map(Variety::degree).sum(),
        }
    }

    /// Degree of a single polynomial vanishing on the set, bounded by the
    /// largest member degree times the member count for unions.
    pub fn single_polynomial_degree(&self) -> u64 {
        match self {
            Variety::Union(members) => {
                members.iter().map(Variety::single_polynomial_degree).max().unwrap_or(0) * members.len() as u64
            }
            // Σ x_j² over the vanishing coordinates, or the one linear form.
            Variety::Subsphere { p, m } => {
                if p - m == 1 {
                    1
                } else {
                    2
                }
            }
            other => other.degree(),
        }
    }
}

/// `d_P(x, W)`.
pub fn distance_to_variety(x: &SpherePoint, variety: &Variety) -> Result<f64> {
    let p = variety.dim()?;
    if x.dim() != p {
        return Err(Error::DimensionMismatch { expected: p + 1, got: x.dim() + 1 });
    }
    match variety {
        Variety::Subsphere { m, .. } => distance_to_subsphere(x, *m),
        Variety::Determinant { n } => {
            let a = DMatrix::from_row_slice(*n, *n, x.coords());
            Ok(singular_values(&a)[0].min(1.0))
        }
        Variety::Curve(curve) => curve.distance(x.coords()),
        Variety::Union(members) => {
            members.iter().try_fold(1.0f64, |acc, v| Ok(acc.min(distance_to_variety(x, v)?)))
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return domain(format!("eps must lie in (0, 1], got {eps}"));
    }
    Ok(())
}

/// Fractions of uniform cap points within projective distance `< ε` of `W`,
/// for every `ε` in the grid, from one shared set of samples.
pub fn estimate_tube_cap_ratios(
    variety: &Variety,
    cap: &Cap,
    eps_grid: &[f64],
    config: &McConfig,
    rng: &RngStream,
) -> Result<Vec<McEstimate>> {
    for &eps in eps_grid {
        check_eps(eps)?;
    }
    let p = variety.dim()?;
    if cap.dim() != p {
        return Err(Error::DimensionMismatch { expected: p + 1, got: cap.dim() + 1 });
    }
    let blocks = run_blocks(config, rng, |block_rng, count| -> Result<Vec<usize>> {
        let mut hits = vec![0usize; eps_grid.len()];
        for _ in 0..count {
            let z = sample_uniform_cap(cap, block_rng);
            let d = distance_to_variety(&z, variety)?;
            for (h, &eps) in hits.iter_mut().zip(eps_grid) {
                if d < eps {
                    *h += 1;
                }
            }
        }
        Ok(hits)
    });
    let mut totals = vec![0usize; eps_grid.len()];
    for block in blocks {
        for (t, h) in totals.iter_mut().zip(block?) {
            *t += h;
        }
    }
    Ok(totals
        .into_iter()
        .map(|k| McEstimate::proportion(k, config.samples, rng.master_seed()))
        .collect())
}

/// Estimate of `vol(T_P(W, ε) ∩ B_P(a, σ)) / vol B_P(a, σ)`.
pub fn estimate_tube_cap_ratio(
    variety: &Variety,
    cap: &Cap,
    eps: f64,
    config: &McConfig,
    rng: &RngStream,
) -> Result<McEstimate> {
    Ok(estimate_tube_cap_ratios(variety, cap, &[eps], config, rng)?.remove(0))
}

fn check_geodesic(p: usize, alpha: f64, i: usize) -> Result<()> {
    if p < 2 {
        return domain("geodesic spheres need p >= 2");
    }
    if !(alpha > 0.0 && alpha <= PI / 2.0) {
        return domain(format!("alpha must lie in (0, pi/2], got {alpha}"));
    }
    if i >= p {
        return domain(format!("curvature index i={i} must be below p={p}"));
    }
    Ok(())
}

/// `vol_{p−1} M_α = O_{p−1} sin^{p−1} α` for the boundary `M_α` of a cap of radius `α`.
pub fn geodesic_sphere_volume(p: usize, alpha: f64) -> Result<f64> {
    check_geodesic(p, alpha, 0)?;
    Ok(sphere_volume(p - 1) * alpha.sin().powi(p as i32 - 1))
}

/// `K_{M_α, i} = C(p−1, i) cot^i α`; all principal curvatures equal `cot α`.
pub fn geodesic_sphere_curvature(p: usize, alpha: f64, i: usize) -> Result<f64> {
    check_geodesic(p, alpha, i)?;
    Ok(binomial(p - 1, i) * (alpha.cos() / alpha.sin()).powi(i as i32))
}

/// `μ_i(M_α) = C(p−1, i) O_{p−1} sin^{p−i−1} α cos^i α`.
pub fn geodesic_sphere_mu(p: usize, alpha: f64, i: usize) -> Result<f64> {
    check_geodesic(p, alpha, i)?;
    let (s, c) = alpha.sin_cos();
    Ok(binomial(p - 1, i) * sphere_volume(p - 1) * s.powi((p - i - 1) as i32) * c.max(0.0).powi(i as i32))
}

/// Both sides of the kinematic identity `μ_i(M_α) = C(p,i) E_g μ_i(gM_α ∩ S^{i+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicCheck {
    pub lhs: f64,
    /// Closed form of the right side.
    pub analytic_rhs: f64,
    /// Monte Carlo estimate of the right side.
    pub rhs: McEstimate,
}

impl KinematicCheck {
    pub fn analytic_relative_gap(&self) -> f64 {
        (self.lhs - self.analytic_rhs).abs() / self.lhs.abs()
    }

    /// `|rhs − lhs| ≤ k` half-widths of the interval.
    pub fn within_half_widths(&self, k: f64) -> bool {
        (self.rhs.estimate - self.lhs).abs() <= k * self.rhs.half_width()
    }
}

/// Checks the kinematic formula for `M_α` against the subsphere `S^{i+1}`.
///
/// For a center `z` uniform on `S^p` at angle `ρ` from `S^{i+1}`, the slice
/// `M_α(z) ∩ S^{i+1}` is a geodesic sphere of radius `δ` in `S^{i+1}` with
/// `cos α = cos ρ cos δ` when `ρ < α`, and empty otherwise; its `μ_i` is
/// `O_i cos^i δ`.
pub fn verify_kinematic(p: usize, i: usize, alpha: f64, config: &McConfig, rng: &RngStream) -> Result<KinematicCheck> {
    let constant = kinematic_constant(p, i)?;
    check_geodesic(p, alpha, i)?;
    let lhs = geodesic_sphere_mu(p, alpha, i)?;
    let q = (p - i - 1) as f64;
    let analytic_rhs = constant
        * (sphere_volume(i) * sphere_volume(i + 1) * sphere_volume(p - i - 2) / sphere_volume(p))
        * alpha.cos().powi(i as i32)
        * alpha.sin().powi((p - i - 1) as i32)
        / q;
    let o_i = sphere_volume(i);
    let cos_alpha = alpha.cos();
    let sin_alpha = alpha.sin();
    let sums = run_blocks(config, rng, |block_rng, count| -> Result<f64> {
        let mut sum = 0.0;
        for _ in 0..count {
            let z = sample_uniform_sphere(p, block_rng)?;
            let sin_rho = euclidean_norm(&z.coords()[i + 2..]);
            if sin_rho < sin_alpha {
                let cos_rho = (1.0 - sin_rho * sin_rho).sqrt();
                sum += o_i * (cos_alpha / cos_rho).powi(i as i32);
            }
        }
        Ok(sum)
    });
    let mut total = 0.0;
    for s in sums {
        total += s?;
    }
    let mean = McEstimate::bounded_mean(total, config.samples, o_i, rng.master_seed());
    Ok(KinematicCheck { lhs, analytic_rhs, rhs: mean.scaled(constant) })
}

/// Volume of the band `B_R(q, α+β) ∖ B_R(q, α−β)`, the normal `β`-tube of `M_α`.
pub fn band_volume(p: usize, alpha: f64, beta: f64) -> Result<f64> {
    if p < 2 {
        return domain("band volumes need p >= 2");
    }
    if !(beta > 0.0 && beta < alpha && alpha + beta <= PI) {
        return domain(format!("need 0 < beta < alpha and alpha + beta <= pi, got alpha={alpha}, beta={beta}"));
    }
    Ok(geodesic_ball_volume(p, alpha + beta)? - geodesic_ball_volume(p, alpha - beta)?)
}

/// Tube volume of `M_α` against `2 Σ_i J_{p,i+1}(β) |μ_i|(M_α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylTubeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl WeylTubeCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.rhs - self.lhs) / self.rhs
    }
}

pub fn verify_weyl_tube_bound(p: usize, alpha: f64, beta: f64) -> Result<WeylTubeCheck> {
    check_geodesic(p, alpha, 0)?;
    let lhs = band_volume(p, alpha, beta)?;
    let mut rhs = 0.0;
    for i in 0..p {
        // Curvatures of M_α are all cot α ≥ 0, so |μ_i| = μ_i.
        rhs += j_integral(p, i + 1, beta)? * geodesic_sphere_mu(p, alpha, i)?;
    }
    rhs *= 2.0;
    Ok(WeylTubeCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-12) })
}
