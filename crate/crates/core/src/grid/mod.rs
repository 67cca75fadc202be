//! Uniform periodic grids on `[-L, L)³` and fields sampled on them.

mod ball;
pub mod snapshot;
pub mod spectral;

use crate::error::{Error, Result};
use crate::real::Real;

pub(crate) use ball::mean_over;
pub use ball::{ball_average, sample_balls, Ball, BallFamily, BallStrategy, Radii, MIN_BALL_NODES};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use spectral::Spectrum;

/// `N` points per axis with spacing `h = 2L/N`; node `k` sits at `-L + k h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3<T> {
    n: usize,
    l: T,
    h: T,
}

impl<T: Real> Grid3<T> {
    pub fn new(n: usize, l: T) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Config(format!("N must be a power of two >= 8, got {n}")));
        }
        if !(l > T::zero()) || !l.is_finite() {
            return Err(Error::Config(format!("L must be positive and finite, got {l}")));
        }
        Ok(Self { n, l, h: T::lit(2.0) * l / T::from_usize_(n) })
    }

    /// `L = 2π`.
    pub fn with_default_box(n: usize) -> Result<Self> {
        Self::new(n, T::lit(2.0) * T::PI())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> T {
        self.l
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h³`.
    pub fn cell_volume(&self) -> T {
        self.h * self.h * self.h
    }

    pub fn volume(&self) -> T {
        let s = T::lit(2.0) * self.l;
        s * s * s
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unidx(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Index of a node given signed per-axis offsets from `(i, j, k)`, wrapping periodically.
    #[inline]
    pub fn wrap_idx(&self, base: [usize; 3], off: [isize; 3]) -> usize {
        let m = self.n - 1;
        let w = |b: usize, o: isize| (b as isize + o) as usize & m;
        self.idx(w(base[0], off[0]), w(base[1], off[1]), w(base[2], off[2]))
    }

    /// `(k - N/2) h`, which equals `-L + k h` and is exactly antisymmetric under `k → N - k`.
    #[inline]
    pub fn coord(&self, k: usize) -> T {
        T::lit(k as f64 - (self.n / 2) as f64) * self.h
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [T; 3] {
        let [i, j, k] = self.unidx(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Index of the node at the origin.
    pub fn origin_index(&self) -> usize {
        let c = self.n / 2;
        self.idx(c, c, c)
    }

    /// Node nearest to `x` after periodic wrapping.
    pub fn nearest_node(&self, x: &[T; 3]) -> usize {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let s = ((x[a] + self.l) / self.h).round();
            let k = s.to_i64().unwrap_or(0).rem_euclid(self.n as i64);
            ijk[a] = k as usize;
        }
        self.idx(ijk[0], ijk[1], ijk[2])
    }

    /// Signed difference `a - b` reduced to `[-L, L)`.
    #[inline]
    pub fn torus_delta(&self, a: T, b: T) -> T {
        let two_l = self.l + self.l;
        let mut d = a - b;
        d = d - two_l * ((d + self.l) / two_l).floor();
        d
    }

    /// Integer wavenumber of FFT index `k` (`0..N/2-1, -N/2..-1`).
    #[inline]
    pub fn wavenumber(&self, k: usize) -> isize {
        if k < self.n / 2 {
            k as isize
        } else {
            k as isize - self.n as isize
        }
    }

    /// Fundamental frequency `π / L`.
    pub fn k0(&self) -> T {
        T::PI() / self.l
    }
}

/// Which discrete derivative to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffMethod {
    #[default]
    Spectral,
    /// Second-order central differences.
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    grid: Grid3<T>,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn from_vec(grid: Grid3<T>, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Config(format!("expected {} values, got {}", grid.len(), data.len())));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid3<T>) -> Self {
        Self { grid, data: vec![T::zero(); grid.len()] }
    }

    pub fn constant(grid: Grid3<T>, c: T) -> Self {
        Self { grid, data: vec![c; grid.len()] }
    }

    pub fn from_fn<F: Fn([T; 3]) -> T>(grid: Grid3<T>, f: F) -> Self {
        Self { grid, data: (0..grid.len()).map(|i| f(grid.point(i))).collect() }
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.data[self.grid.idx(i, j, k)]
    }

    pub fn at_origin(&self) -> T {
        self.data[self.grid.origin_index()]
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// Arithmetic mean over all nodes.
    ///
    /// Each row along the third axis is summed in `(k, N - k)` pairs, so the
    /// result is bit-identical for a field and its `y₃` reflection.
    pub fn mean(&self) -> T {
        let n = self.grid.n;
        let rows: Vec<T> = self
            .data
            .chunks_exact(n)
            .map(|row| {
                let mut s = row[0] + row[n / 2];
                for k in 1..n / 2 {
                    s = s + (row[k] + row[n - k]);
                }
                s
            })
            .collect();
        sum_ordered(&rows) / T::from_usize_(self.data.len())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `f(y₁, y₂, -y₃)` via `k → (N - k) mod N` on the third axis.
    pub fn reflect_y3(&self) -> Self {
        let n = self.grid.n;
        let mut out = vec![T::zero(); self.data.len()];
        for (row, dst) in self.data.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            dst[0] = row[0];
            for k in 1..n {
                dst[k] = row[n - k];
            }
        }
        Self { grid: self.grid, data: out }
    }

    /// `(f + s·reflect(f)) / 2` with `s = ±1`.
    pub fn parity_part(&self, even: bool) -> Self {
        let r = self.reflect_y3();
        let half = T::lit(0.5);
        if even {
            self.zip_with(&r, |a, b| half * (a + b))
        } else {
            self.zip_with(&r, |a, b| half * (a - b))
        }
    }

    /// Largest deviation from the requested `y₃` parity.
    pub fn parity_defect(&self, even: bool) -> T {
        let r = self.reflect_y3();
        self.data
            .iter()
            .zip(&r.data)
            .fold(T::zero(), |m, (&a, &b)| m.max(if even { (a - b).abs() } else { (a + b).abs() }))
    }

    pub fn derivative(&self, axis: usize, method: DiffMethod) -> Self {
        match method {
            DiffMethod::Spectral => spectral::derivative(self, axis),
            DiffMethod::FiniteDifference => self.fd_derivative(axis),
        }
    }

    pub fn gradient(&self, method: DiffMethod) -> VectorField3<T> {
        VectorField3::from_components([
            self.derivative(0, method),
            self.derivative(1, method),
            self.derivative(2, method),
        ])
    }

    pub fn laplacian(&self, method: DiffMethod) -> Self {
        match method {
            DiffMethod::Spectral => spectral::laplacian(self),
            DiffMethod::FiniteDifference => self.fd_laplacian(),
        }
    }

    fn fd_derivative(&self, axis: usize) -> Self {
        let g = self.grid;
        let inv = T::one() / (g.h + g.h);
        let mut off = [0isize; 3];
        off[axis] = 1;
        let back = [-off[0], -off[1], -off[2]];
        let data = (0..g.len())
            .map(|idx| {
                let b = g.unidx(idx);
                (self.data[g.wrap_idx(b, off)] - self.data[g.wrap_idx(b, back)]) * inv
            })
            .collect();
        Self { grid: g, data }
    }

    fn fd_laplacian(&self) -> Self {
        let g = self.grid;
        let data = (0..g.len()).map(|idx| fd_laplacian_at(self, idx)).collect();
        Self { grid: g, data }
    }
}

/// Seven-point Laplacian at one node.
pub fn fd_laplacian_at<T: Real>(f: &ScalarField<T>, idx: usize) -> T {
    let g = f.grid;
    let b = g.unidx(idx);
    let c = f.data[idx];
    let mut s = T::zero();
    for a in 0..3 {
        let mut off = [0isize; 3];
        off[a] = 1;
        let p = f.data[g.wrap_idx(b, off)];
        off[a] = -1;
        let m = f.data[g.wrap_idx(b, off)];
        s = s + (p - c) + (m - c);
    }
    s / (g.h * g.h)
}

/// Pairwise summation, independent of thread count.
pub(crate) fn sum_ordered<T: Real>(v: &[T]) -> T {
    if v.len() <= 64 {
        return v.iter().fold(T::zero(), |a, &b| a + b);
    }
    let (a, b) = v.split_at(v.len() / 2);
    sum_ordered(a) + sum_ordered(b)
}

/// Three scalar components on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField3<T> {
    comps: [ScalarField<T>; 3],
}

impl<T: Real> VectorField3<T> {
    pub fn from_components(comps: [ScalarField<T>; 3]) -> Self {
        assert!(comps[0].grid == comps[1].grid && comps[1].grid == comps[2].grid, "components on different grids");
        Self { comps }
    }

    pub fn zeros(grid: Grid3<T>) -> Self {
        Self::from_components([ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)])
    }

    pub fn from_fn<F: Fn([T; 3]) -> [T; 3]>(grid: Grid3<T>, f: F) -> Self {
        let mut c = [Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len())];
        for i in 0..grid.len() {
            let v = f(grid.point(i));
            for a in 0..3 {
                c[a].push(v[a]);
            }
        }
        let [a, b, d] = c;
        Self::from_components([
            ScalarField { grid, data: a },
            ScalarField { grid, data: b },
            ScalarField { grid, data: d },
        ])
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.comps[0].grid
    }

    pub fn component(&self, a: usize) -> &ScalarField<T> {
        &self.comps[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut ScalarField<T> {
        &mut self.comps[a]
    }

    pub fn components(&self) -> &[ScalarField<T>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [ScalarField<T>; 3] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [T; 3] {
        [self.comps[0].data[idx], self.comps[1].data[idx], self.comps[2].data[idx]]
    }

    pub fn map_components<F: Fn(&ScalarField<T>) -> ScalarField<T>>(&self, f: F) -> Self {
        Self::from_components([f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])])
    }

    pub fn zip_components<F: Fn(&ScalarField<T>, &ScalarField<T>) -> ScalarField<T>>(&self, o: &Self, f: F) -> Self {
        Self::from_components([
            f(&self.comps[0], &o.comps[0]),
            f(&self.comps[1], &o.comps[1]),
            f(&self.comps[2], &o.comps[2]),
        ])
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_components(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_components(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: T) -> Self {
        self.map_components(|a| a.scale(c))
    }

    /// Pointwise `|v|`.
    pub fn magnitude(&self) -> ScalarField<T> {
        let g = *self.grid();
        let data = (0..g.len())
            .map(|i| {
                let v = self.at(i);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .collect();
        ScalarField { grid: g, data }
    }

    pub fn max_norm(&self) -> T {
        self.magnitude().max_abs()
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    /// Discrete `L²` norm `(Σ|v|² h³)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        let g = self.grid();
        let sq: Vec<T> = self.comps.iter().map(|c| sum_ordered(&c.data.iter().map(|&v| v * v).collect::<Vec<_>>())).collect();
        ((sq[0] + sq[1] + sq[2]) * g.cell_volume()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }

    /// Reflects every component in `y₃` without changing signs.
    pub fn reflect_y3(&self) -> Self {
        self.map_components(|c| c.reflect_y3())
    }

    pub fn divergence(&self, method: DiffMethod) -> ScalarField<T> {
        self.comps[0]
            .derivative(0, method)
            .add(&self.comps[1].derivative(1, method))
            .add(&self.comps[2].derivative(2, method))
    }

    pub fn curl(&self, method: DiffMethod) -> Self {
        let d = |c: usize, a: usize| self.comps[c].derivative(a, method);
        Self::from_components([d(2, 1).sub(&d(1, 2)), d(0, 2).sub(&d(2, 0)), d(1, 0).sub(&d(0, 1))])
    }

    pub fn laplacian(&self, method: DiffMethod) -> Self {
        self.map_components(|c| c.laplacian(method))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid3<f64> {
        Grid3::with_default_box(n).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(Grid3::<f64>::new(12, 1.0).is_err());
        assert!(Grid3::<f64>::new(4, 1.0).is_err());
        assert!(Grid3::<f64>::new(8, 0.0).is_err());
        let g = grid(16);
        assert_eq!(g.h() * 16.0, 2.0 * g.l());
        assert_eq!(g.coord(0), -g.l());
        assert_eq!(g.point(g.origin_index()), [0.0; 3]);
        assert_eq!(g.unidx(g.idx(3, 5, 7)), [3, 5, 7]);
    }

    #[test]
    fn torus_delta_wraps() {
        let g = Grid3::<f64>::new(8, 1.0).unwrap();
        assert!((g.torus_delta(0.9, -0.9) + 0.2).abs() < 1e-15);
        assert!((g.torus_delta(0.25, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn reflect_is_an_involution() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |p| (p[0] + 2.0 * p[1]).sin() + p[2].cos() * 0.3 + p[2]);
        assert_eq!(f.reflect_y3().reflect_y3(), f);
        assert_eq!(f.reflect_y3().mean(), f.mean());
        let odd = f.parity_part(false);
        let r = odd.reflect_y3();
        assert!(r.data().iter().zip(odd.data()).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn sawtooth_reflection_off_seam() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |p| p[2]);
        let r = f.reflect_y3();
        for idx in 0..g.len() {
            let k = g.unidx(idx)[2];
            if k == 0 {
                // y₃ = -L reflects onto itself
                assert_eq!(r.data()[idx], f.data()[idx]);
            } else {
                assert!((r.data()[idx] + f.data()[idx]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_derivative_of_mode() {
        let g = grid(16);
        let l = g.l();
        let f = ScalarField::from_fn(g, |p| (PI * p[0] / l).sin());
        let d = f.derivative(0, DiffMethod::Spectral);
        let lap = f.laplacian(DiffMethod::Spectral);
        for i in 0..g.len() {
            let p = g.point(i);
            assert!((d.data()[i] - PI / l * (PI * p[0] / l).cos()).abs() < 1e-12);
            assert!((lap.data()[i] + (PI / l).powi(2) * (PI * p[0] / l).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn fd_converges_at_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |p| (0.5 * p[0]).sin() * (p[1] * 0.5 + p[2]).cos());
            let g2 = ScalarField::from_fn(g, |p| (p[0] * 0.5 - p[2] * 0.5).cos());
            let prod = f.mul(&g2);
            let a = prod.derivative(2, DiffMethod::Spectral);
            let b = prod.derivative(2, DiffMethod::FiniteDifference);
            a.sub(&b).max_abs()
        };
        let ratio = err(32) / err(64);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |p| (p[0] * 0.5).sin() * (p[1]).cos() + (p[2] * 1.5).sin());
        let c = f.gradient(DiffMethod::Spectral).curl(DiffMethod::Spectral);
        assert!(c.max_abs() < 1e-12);
    }
}
