//! Seeded random test fields: band-limited scalars and vectors, symmetric
//! flows, decompositions and smooth bumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;

use crate::frame::{symmetrize, Decomposition, FramedField};
use crate::grid::spectral::Spectrum;
use crate::grid::{DiffMethod, Grid3, ScalarField, VectorField3};
use crate::real::Real;

/// A ChaCha8 stream; equal seeds give bit-identical fields.
#[derive(Clone, Debug)]
pub struct Synth {
    rng: ChaCha8Rng,
}

impl Synth {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Random coefficients on `|m|_∞ ≤ kmax` (zero mode included), scaled to `max|f| = 1`.
    ///
    /// Coefficients are drawn in wavenumber order, so one seed gives the same
    /// trigonometric polynomial on every grid with `N/2 > kmax`.
    pub fn band_limited<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize) -> ScalarField<T> {
        let f = self.trig_poly(grid, kmax, true);
        let m = f.max_abs();
        if m == T::zero() {
            f
        } else {
            f.scale(T::one() / m)
        }
    }

    /// The unnormalized polynomial behind [`Synth::band_limited`].
    pub fn trig_poly<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize, with_mean: bool) -> ScalarField<T> {
        let n = grid.n();
        let k = kmax.min(n / 2 - 1) as isize;
        let mut data = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        let slot = |m: isize| m.rem_euclid(n as isize) as usize;
        for a in -k..=k {
            for b in -k..=k {
                for c in -k..=k {
                    let z = Complex::new(T::lit(self.rng.gen_range(-1.0..1.0)), T::lit(self.rng.gen_range(-1.0..1.0)));
                    if (a, b, c) != (0, 0, 0) || with_mean {
                        data[grid.idx(slot(a), slot(b), slot(c))] = z * T::from_usize_(grid.len());
                    }
                }
            }
        }
        Spectrum::from_vec(*grid, data).to_real()
    }

    /// As [`Synth::band_limited`] with the mean removed.
    pub fn mean_zero<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize) -> ScalarField<T> {
        let f = self.trig_poly(grid, kmax, false);
        let m = f.max_abs();
        if m == T::zero() {
            f
        } else {
            f.scale(T::one() / m)
        }
    }

    pub fn vector<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize) -> VectorField3<T> {
        VectorField3::from_components(std::array::from_fn(|_| self.band_limited(grid, kmax)))
    }

    /// The parity projection of a random vector field, read as a field in `y`.
    pub fn symmetric<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize) -> VectorField3<T> {
        let v = self.vector(grid, kmax);
        symmetrize(&FramedField::from_y_field(v, T::zero())).sym
    }

    /// `U` symmetric and `r` of relative size `rem_scale`, with spectral `∂₃`.
    pub fn decomposition<T: Real>(&mut self, grid: &Grid3<T>, kmax: usize, rem_scale: T) -> Decomposition<T> {
        let sym = self.symmetric(grid, kmax);
        let rem = self.vector(grid, kmax).scale(rem_scale);
        let d3 = |v: &VectorField3<T>| v.map_components(|c| c.derivative(2, DiffMethod::Spectral));
        Decomposition { d3_sym: d3(&sym), d3_rem: d3(&rem), sym, rem, window: None }
    }

    /// A Gaussian bump `a e^{-|x-c|²/2s²} e` plus a weaker, wider second bump,
    /// with centers at least `L/2` from the boundary.
    pub fn bump<T: Real>(&mut self, grid: &Grid3<T>) -> VectorField3<T> {
        let l = grid.l().to_f64_();
        let mut one = |scale: f64| {
            let c: [f64; 3] = std::array::from_fn(|_| self.rng.gen_range(-0.5 * l..0.5 * l) * 0.5);
            let mut e: [f64; 3] = std::array::from_fn(|_| self.rng.gen_range(-1.0..1.0));
            let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt().max(1e-3);
            e = e.map(|x| x / n);
            let s = self.rng.gen_range(0.15..0.25) * l;
            (c, e, s * scale)
        };
        let first = one(1.0);
        let second = one(1.5);
        VectorField3::from_fn(*grid, |p| {
            let p = p.map(|v| v.to_f64_());
            let term = |(c, e, s): ([f64; 3], [f64; 3], f64), a: f64| {
                let r2: f64 = (0..3).map(|k| (p[k] - c[k]).powi(2)).sum();
                e.map(|x| a * x * (-r2 / (2.0 * s * s)).exp())
            };
            let a = term(first, 1.0);
            let b = term(second, 0.3);
            std::array::from_fn(|k| T::lit(a[k] + b[k]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_normalized() {
        let g = Grid3::<f64>::new(8, 3.0).unwrap();
        let a = Synth::new(1).band_limited(&g, 2);
        assert_eq!(a, Synth::new(1).band_limited(&g, 2));
        assert!((a.max_abs() - 1.0).abs() < 1e-15);
        assert!(Synth::new(2).mean_zero(&g, 2).mean().abs() < 1e-15);
        // same polynomial on a finer grid
        let fine = Grid3::<f64>::new(16, 3.0).unwrap();
        let a = Synth::new(4).trig_poly(&g, 2, true);
        let b = Synth::new(4).trig_poly(&fine, 2, true);
        for i in 0..8 {
            assert!((a.at(i, 3, 5) - b.at(2 * i, 6, 10)).abs() < 1e-12);
        }
        let d = Synth::new(3).decomposition(&g, 2, 0.1);
        assert_eq!(d.parity_defect(), 0.0);
    }
}
