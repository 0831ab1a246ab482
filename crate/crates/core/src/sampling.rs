//! Reproducible random generation on spheres, caps and `O(n)`.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::sphere_geom::{dot, euclidean_norm, trig_moment, Cap, SpherePoint};

/// Tangent directions whose projected norm falls below this are resampled.
const DEGENERATE_DIRECTION: f64 = 1e-12;

/// A deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8 with the stream index mapped onto ChaCha's 64-bit
/// stream id, so distinct indices under one seed never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self { master_seed, stream_index, rng }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A child stream keyed by this stream's identity and `child`.
    ///
    /// Children depend only on `(master_seed, stream_index, child)`, never on
    /// how much of the parent has been consumed.
    pub fn child(&self, child: u64) -> RngStream {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_index ^ 0xA076_1D64_78BD_642F));
        RngStream::new(key, child)
    }

    pub(crate) fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform in `[0, 1)`.
    pub(crate) fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_vector(len: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..len).map(|_| rng.standard_normal()).collect()
}

/// Uniform point on `S^p`: a normalized standard Gaussian vector.
pub fn sample_uniform_sphere(p: usize, rng: &mut RngStream) -> Result<SpherePoint> {
    if p == 0 {
        return domain("sample_uniform_sphere needs p >= 1");
    }
    loop {
        let mut v = gaussian_vector(p + 1, rng);
        let norm = euclidean_norm(&v);
        if norm > DEGENERATE_DIRECTION {
            v.iter_mut().for_each(|x| *x /= norm);
            return Ok(SpherePoint::from_unit_unchecked(v));
        }
    }
}

/// Uniform unit vector orthogonal to `a`.
fn tangent_direction(a: &[f64], rng: &mut RngStream) -> Vec<f64> {
    loop {
        let mut v = gaussian_vector(a.len(), rng);
        let along = dot(&v, a);
        v.iter_mut().zip(a).for_each(|(x, ai)| *x -= along * ai);
        let norm = euclidean_norm(&v);
        if norm >= DEGENERATE_DIRECTION {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Outcome of inverting the cap-radius distribution function.
#[derive(Debug, Clone, Copy)]
pub struct CapRadius {
    /// Angular distance from the cap center.
    pub rho: f64,
    /// `|J_{p,p}(ρ) − target|`.
    pub residual: f64,
    /// `J_{p,p}(α)` for the cap radius `α`.
    pub total: f64,
}

/// Solves `J_{p,p}(ρ) = u · J_{p,p}(α)` for `ρ ∈ [0, α]` by safeguarded Newton.
///
/// The density of the angular radius of a uniform cap point is proportional
/// to `sin^{p-1} ρ`, so this is the inverse CDF at `u ∈ [0, 1]`.
pub fn cap_radius_inverse_cdf(p: usize, alpha: f64, u: f64) -> CapRadius {
    let cumulative = |r: f64| trig_moment(p - 1, 0, r);
    let total = cumulative(alpha);
    let target = u.clamp(0.0, 1.0) * total;
    let tol = 1e-13 * total;
    let (mut lo, mut hi) = (0.0, alpha);
    // J_{p,p}(ρ) ≤ ρ^p / p, so this guess never overshoots the root.
    let mut rho = (p as f64 * target).powf(1.0 / p as f64).min(alpha);
    let mut f = cumulative(rho) - target;
    for _ in 0..200 {
        if f.abs() <= tol {
            break;
        }
        if f < 0.0 {
            lo = rho;
        } else {
            hi = rho;
        }
        if hi - lo <= f64::EPSILON * alpha {
            break;
        }
        let slope = rho.sin().powi(p as i32 - 1);
        let newton = if slope > 0.0 { rho - f / slope } else { f64::NAN };
        rho = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        f = cumulative(rho) - target;
    }
    CapRadius { rho, residual: f.abs(), total }
}

/// Uniform point on the cap `B_P(a, σ)`.
///
/// The angular radius comes from the inverse CDF of `sin^{p-1}ρ` on
/// `[0, arcsin σ]`; the direction is uniform in the tangent space at `a`;
/// the point is `cos ρ · a + sin ρ · u`.
pub fn sample_uniform_cap(cap: &Cap, rng: &mut RngStream) -> SpherePoint {
    let a = cap.center().coords();
    let p = cap.dim();
    let radius = cap_radius_inverse_cdf(p, cap.angular_radius(), rng.uniform());
    let u = tangent_direction(a, rng);
    let (s, c) = radius.rho.sin_cos();
    let mut z: Vec<f64> = a.iter().zip(&u).map(|(ai, ui)| c * ai + s * ui).collect();
    let norm = euclidean_norm(&z);
    z.iter_mut().for_each(|x| *x /= norm);
    SpherePoint::from_unit_unchecked(z)
}

/// An orthogonal `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return domain("a rotation must be a nonempty square matrix");
        }
        let r = Rotation { matrix };
        let err = r.orthogonality_error();
        if err > 1e-10 {
            return domain(format!("matrix is not orthogonal (max |MᵀM − I| = {err:e})"));
        }
        Ok(r)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |MᵀM − I|` entrywise.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let gram = self.matrix.transpose() * &self.matrix;
        (gram - DMatrix::<f64>::identity(n, n)).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn transpose(&self) -> Rotation {
        Rotation { matrix: self.matrix.transpose() }
    }

    /// `M x` for a point of `S^{n-1}`.
    pub fn apply(&self, x: &SpherePoint) -> Result<SpherePoint> {
        if x.coords().len() != self.size() {
            return Err(crate::Error::DimensionMismatch { expected: self.size(), got: x.coords().len() });
        }
        let v = &self.matrix * nalgebra::DVector::from_column_slice(x.coords());
        SpherePoint::from_vector(v.iter().copied().collect())
    }
}

/// Haar-distributed element of `O(n)`: QR of a Gaussian matrix with the
/// columns of `Q` sign-corrected so that `R` has a positive diagonal.
pub fn sample_rotation(n: usize, rng: &mut RngStream) -> Result<Rotation> {
    if n == 0 {
        return domain("sample_rotation needs n >= 1");
    }
    let g = DMatrix::from_fn(n, n, |_, _| rng.standard_normal());
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(Rotation { matrix: q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_geom::riemannian_distance;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    /// Critical value of the two-sample KS test at level 1%.
    fn ks_critical_1pct(n: usize, m: usize) -> f64 {
        1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = (0..4).map({
            let mut r = RngStream::new(7, 3);
            move |_| r.next_u64()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = RngStream::new(7, 3);
            move |_| r.next_u64()
        }).collect();
        let c: Vec<u64> = (0..4).map({
            let mut r = RngStream::new(7, 4);
            move |_| r.next_u64()
        }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let mut parent = RngStream::new(7, 3);
        let before = parent.child(5).next_u64();
        parent.next_u64();
        assert_eq!(before, parent.child(5).next_u64());
    }

    #[test]
    fn uniform_sphere_moments() {
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let mut mean = [0.0; 3];
        let mut positive = 0usize;
        for _ in 0..n {
            let x = sample_uniform_sphere(2, &mut rng).unwrap();
            assert!((euclidean_norm(x.coords()) - 1.0).abs() < 1e-14);
            for (m, c) in mean.iter_mut().zip(x.coords()) {
                *m += c / n as f64;
            }
            positive += (x.coords()[0] > 0.0) as usize;
        }
        for m in mean {
            assert!(m.abs() < 4.0 / (n as f64).sqrt(), "mean {m}");
        }
        let frac = positive as f64 / n as f64;
        let ci = 2.576 * (0.25 / n as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * ci, "P(x0 > 0) = {frac}");
    }

    #[test]
    fn cap_samples_stay_in_support() {
        let mut rng = RngStream::new(3, 1);
        for &(p, sigma) in &[(1usize, 0.3), (2, 0.05), (5, 0.7), (8, 1.0), (30, 0.2)] {
            let cap = Cap::new(sample_uniform_sphere(p, &mut rng).unwrap(), sigma).unwrap();
            for _ in 0..2000 {
                let z = sample_uniform_cap(&cap, &mut rng);
                let d = riemannian_distance(cap.center(), &z).unwrap();
                assert!(d <= cap.angular_radius() + 1e-12, "p={p} sigma={sigma} d={d}");
            }
        }
    }

    #[test]
    fn cap_radius_residuals() {
        for &p in &[1usize, 2, 3, 8, 20, 60] {
            for &alpha in &[1e-3, 0.05, 0.4, 0.9, FRAC_PI_2] {
                for k in 0..=50 {
                    let u = k as f64 / 50.0;
                    let r = cap_radius_inverse_cdf(p, alpha, u);
                    assert!(r.rho >= 0.0 && r.rho <= alpha);
                    assert!(r.residual <= 1e-12 * r.total, "p={p} alpha={alpha} u={u}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn hemisphere_cap_probability() {
        // P(d_R ≤ π/3) on the p=2 hemisphere = (1 − cos π/3)/(1 − cos π/2) = 1/2.
        let mut rng = RngStream::new(5, 0);
        let cap = Cap::new(SpherePoint::north(2).unwrap(), 1.0).unwrap();
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                let z = sample_uniform_cap(&cap, &mut rng);
                riemannian_distance(cap.center(), &z).unwrap() <= PI / 3.0
            })
            .count();
        let frac = hits as f64 / n as f64;
        let ci = 2.576 * (0.25 / n as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * ci, "{frac}");
    }

    #[test]
    fn cap_mean_cosine_matches_quadrature() {
        // E⟨z, a⟩ = ∫ cos ρ sin^{p-1}ρ dρ / J_{p,p}(π/2) over the hemisphere.
        for &p in &[2usize, 4, 7] {
            let mut rng = RngStream::new(17, p as u64);
            let cap = Cap::new(SpherePoint::north(p).unwrap(), 1.0).unwrap();
            let n = 100_000;
            let vals: Vec<f64> = (0..n).map(|_| sample_uniform_cap(&cap, &mut rng).coords()[0]).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let num = crate::quadrature::integrate(|r| r.cos() * r.sin().powi(p as i32 - 1), 0.0, FRAC_PI_2, 1e-13);
            let den = crate::quadrature::integrate(|r| r.sin().powi(p as i32 - 1), 0.0, FRAC_PI_2, 1e-13);
            let expected = num / den;
            let ci = 2.576 * (var / n as f64).sqrt();
            assert!((mean - expected).abs() < 3.0 * ci, "p={p}: {mean} vs {expected}");
        }
    }

    #[test]
    fn hemisphere_cap_agrees_with_conditioned_sphere() {
        let p = 3;
        let n = 100_000;
        let a = SpherePoint::north(p).unwrap();
        let cap = Cap::new(a.clone(), 1.0).unwrap();
        let mut rng_cap = RngStream::new(23, 0);
        let mut rng_sph = RngStream::new(23, 1);
        let from_cap: Vec<f64> = (0..n).map(|_| sample_uniform_cap(&cap, &mut rng_cap).coords()[0]).collect();
        let mut from_sphere = Vec::with_capacity(n);
        while from_sphere.len() < n {
            let z = sample_uniform_sphere(p, &mut rng_sph).unwrap();
            if z.coords()[0] >= 0.0 {
                from_sphere.push(z.coords()[0]);
            }
        }
        let d = ks_statistic(from_cap, from_sphere);
        assert!(d < ks_critical_1pct(n, n), "KS statistic {d}");
    }

    #[test]
    fn rotations_are_orthogonal_and_haar() {
        let mut rng = RngStream::new(29, 0);
        let n = 100_000;
        let x = SpherePoint::from_vector(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let mut rotated = Vec::with_capacity(n);
        let mut negative_det = 0usize;
        for _ in 0..n {
            let m = sample_rotation(4, &mut rng).unwrap();
            assert!(m.orthogonality_error() <= 1e-10);
            let det = m.determinant();
            assert!((det.abs() - 1.0).abs() < 1e-10);
            negative_det += (det < 0.0) as usize;
            rotated.push(m.apply(&x).unwrap().coords()[0]);
        }
        let mut rng2 = RngStream::new(29, 1);
        let uniform: Vec<f64> = (0..n).map(|_| sample_uniform_sphere(3, &mut rng2).unwrap().coords()[0]).collect();
        let d = ks_statistic(rotated, uniform);
        assert!(d < ks_critical_1pct(n, n), "KS statistic {d}");
        let frac = negative_det as f64 / n as f64;
        let ci = 2.576 * (0.25 / n as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * ci, "det<0 frequency {frac}");
    }

    #[test]
    fn rotation_validation() {
        assert!(sample_rotation(0, &mut RngStream::new(1, 1)).is_err());
        assert!(Rotation::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).is_err());
        assert!(Rotation::from_matrix(DMatrix::identity(3, 3)).is_ok());
    }
}
