//! Spot checks of the size, smoothness and cancellation conditions on a
//! singular kernel, and direct quadrature of its truncated operator.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::c3;
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::real::Real;

type Kernel<T> = Arc<dyn Fn([T; 3], [T; 3]) -> T + Send + Sync>;

/// `T_η f(x) = ∫_{|x-y|≥η} K(x,y) f(y) dy` evaluated by midpoint quadrature on grid nodes.
#[derive(Clone)]
pub struct TruncatedKernelOp<T: Real> {
    kernel: Kernel<T>,
    pub kappa: T,
    pub eta: T,
}

impl<T: Real> fmt::Debug for TruncatedKernelOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedKernelOp").field("kappa", &self.kappa).field("eta", &self.eta).finish_non_exhaustive()
    }
}

impl<T: Real> TruncatedKernelOp<T> {
    pub fn new<F>(kernel: F, kappa: T, eta: T) -> Result<Self>
    where
        F: Fn([T; 3], [T; 3]) -> T + Send + Sync + 'static,
    {
        if !(kappa > T::zero() && kappa <= T::one()) {
            return Err(Error::Config(format!("kappa must lie in (0, 1], got {kappa}")));
        }
        if !(eta > T::zero()) {
            return Err(Error::Config(format!("eta must be positive, got {eta}")));
        }
        Ok(Self { kernel: Arc::new(kernel), kappa, eta })
    }

    /// `c₃ (x_j - y_j)/|x - y|⁴`, a kernel of type 1.
    pub fn riesz(axis: usize, eta: T) -> Result<Self> {
        Self::new(move |x: [T; 3], y: [T; 3]| riesz_kernel(axis, x, y), T::one(), eta)
    }

    pub fn kernel(&self, x: [T; 3], y: [T; 3]) -> T {
        (self.kernel)(x, y)
    }

    /// `T_η f(x)` with the box treated as the whole domain.
    pub fn apply_at(&self, f: &ScalarField<T>, x: [T; 3]) -> T {
        self.quadrature(f, x, false)
    }

    /// `T̃_η f(x)`, whose kernel is `K(x,y) - K(0,y)(1 - χ_{B(0,1)}(y))`.
    pub fn apply_modified_at(&self, f: &ScalarField<T>, x: [T; 3]) -> T {
        self.quadrature(f, x, true)
    }

    fn quadrature(&self, f: &ScalarField<T>, x: [T; 3], modified: bool) -> T {
        let g = f.grid();
        let eta2 = self.eta * self.eta;
        let mut s = T::zero();
        for (idx, &v) in f.data().iter().enumerate() {
            if v == T::zero() {
                continue;
            }
            let y = g.point(idx);
            let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2);
            if d2 < eta2 {
                continue;
            }
            let mut k = self.kernel(x, y);
            if modified {
                let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                if y2 >= T::one() {
                    k = k - self.kernel([T::zero(); 3], y);
                }
            }
            s = s + k * v;
        }
        s * g.cell_volume()
    }
}

pub(crate) fn riesz_kernel<T: Real>(axis: usize, x: [T; 3], y: [T; 3]) -> T {
    let z = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    c3::<T>() * z[axis] / (r2 * r2)
}

/// Sample points for the kernel conditions.
#[derive(Clone, Debug)]
pub struct KernelSamples<T> {
    /// Triples with `|x - y| ≥ 2|x - z|`.
    pub triples: Vec<([T; 3], [T; 3], [T; 3])>,
    /// `(center, r, R)` annuli for the cancellation integrals.
    pub annuli: Vec<([T; 3], T, T)>,
    /// Points per annulus integral.
    pub quadrature_points: usize,
}

fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n2: f64 = v.iter().map(|a| a * a).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

impl<T: Real> KernelSamples<T> {
    /// `count` random triples and annuli from a seeded generator.
    pub fn random(seed: u64, count: usize, quadrature_points: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut triples = Vec::with_capacity(count);
        let mut annuli = Vec::with_capacity(count);
        let t = |v: [f64; 3]| [T::lit(v[0]), T::lit(v[1]), T::lit(v[2])];
        for _ in 0..count {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let d: f64 = rng.gen_range(0.05..3.0);
            let u = random_unit(&mut rng);
            let y = [x[0] + d * u[0], x[1] + d * u[1], x[2] + d * u[2]];
            let e = d * rng.gen_range(0.0..0.5);
            let w = random_unit(&mut rng);
            let z = [x[0] + e * w[0], x[1] + e * w[1], x[2] + e * w[2]];
            triples.push((t(x), t(y), t(z)));
            let r: f64 = rng.gen_range(0.05..1.0);
            annuli.push((t(x), T::lit(r), T::lit(r * rng.gen_range(1.5..10.0))));
        }
        Self { triples, annuli, quadrature_points }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelReport {
    /// `max |K(x,y)| |x - y|³`.
    pub size_constant: f64,
    /// `max (|K(x,y) - K(z,y)| + |K(y,x) - K(y,z)|) |x - y|³ (|x - y|/|x - z|)^κ`.
    pub smoothness_constant: f64,
    /// Largest `|∫_{r ≤ |x-y| < R} K(x,y) dy|` or `|∫ K(y,x) dy|`.
    pub annulus_max: f64,
    pub samples: usize,
}

/// Evaluates the three kernel conditions on `samples`.
///
/// Annulus integrals use a radial Gauss–Legendre rule in `log ρ` times
/// antipodal pairs of seeded random directions.
pub fn check_kernel_conditions<T: Real, F>(kernel: F, kappa: T, samples: &KernelSamples<T>) -> Result<KernelReport>
where
    F: Fn([T; 3], [T; 3]) -> T,
{
    let dist = |a: [T; 3], b: [T; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    let mut size = 0.0f64;
    let mut smooth = 0.0f64;
    for &(x, y, z) in &samples.triples {
        let dxy = dist(x, y);
        if dxy == T::zero() {
            return Err(Error::Domain("degenerate sample with x = y".into()));
        }
        let dxz = dist(x, z);
        if dxy < T::lit(2.0) * dxz {
            return Err(Error::Domain("sample violates |x - y| >= 2|x - z|".into()));
        }
        let d3 = dxy * dxy * dxy;
        size = size.max((kernel(x, y).abs() * d3).to_f64_());
        if dxz > T::zero() {
            let diff = (kernel(x, y) - kernel(z, y)).abs() + (kernel(y, x) - kernel(y, z)).abs();
            smooth = smooth.max((diff * d3 * (dxy / dxz).powf(kappa)).to_f64_());
        }
    }
    let mut annulus = 0.0f64;
    if !samples.annuli.is_empty() {
        let (nodes, weights) = gauss_legendre(16);
        let dirs = ((samples.quadrature_points / 32).max(1)).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut omegas: Vec<[T; 3]> = Vec::with_capacity(2 * dirs);
        for _ in 0..dirs {
            let u = random_unit(&mut rng);
            omegas.push([T::lit(u[0]), T::lit(u[1]), T::lit(u[2])]);
            omegas.push([T::lit(-u[0]), T::lit(-u[1]), T::lit(-u[2])]);
        }
        let sphere = T::lit(4.0) * T::PI() / T::from_usize_(omegas.len());
        for &(x, r, big_r) in &samples.annuli {
            if !(r > T::zero() && big_r > r) {
                return Err(Error::Domain("annulus needs 0 < r < R".into()));
            }
            let (a, b) = (r.ln(), big_r.ln());
            let mut s1 = T::zero();
            let mut s2 = T::zero();
            for (&t, &w) in nodes.iter().zip(&weights) {
                let s = T::lit(0.5) * (a + b) + T::lit(0.5) * (b - a) * T::lit(t);
                let rho = s.exp();
                // dy = ρ² dρ dω = ρ³ ds dω
                let jac = T::lit(w) * T::lit(0.5) * (b - a) * rho * rho * rho * sphere;
                for om in &omegas {
                    let y = [x[0] + rho * om[0], x[1] + rho * om[1], x[2] + rho * om[2]];
                    s1 = s1 + jac * kernel(x, y);
                    s2 = s2 + jac * kernel(y, x);
                }
            }
            annulus = annulus.max(s1.abs().to_f64_()).max(s2.abs().to_f64_());
        }
    }
    Ok(KernelReport {
        size_constant: size,
        smoothness_constant: smooth,
        annulus_max: annulus,
        samples: samples.triples.len(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}
