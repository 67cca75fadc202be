//! Three-dimensional FFTs and Fourier multipliers on [`Grid3`].
//!
//! Odd symbols (first derivatives, Riesz transforms, the Leray projector)
//! use wavenumbers with the Nyquist component set to zero so that real
//! fields stay real; even symbols such as the Laplacian use the full
//! wavenumber.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{Grid3, ScalarField};
use crate::real::Real;

struct Plans<T> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

type PlanCache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn plans<T: Real>(n: usize) -> Arc<Plans<T>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("plan cache poisoned");
    let entry = map.entry((TypeId::of::<T>(), n)).or_insert_with(|| {
        let mut planner = FftPlanner::<T>::new();
        let p: Arc<Plans<T>> = Arc::new(Plans { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) });
        p
    });
    entry.clone().downcast::<Plans<T>>().expect("plan cache type mismatch")
}

fn run_lines<T: Real>(fft: &Arc<dyn Fft<T>>, buf: &mut [Complex<T>], n: usize) {
    let scratch_len = fft.get_inplace_scratch_len();
    buf.par_chunks_mut(n * n).for_each(|chunk| {
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); scratch_len];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// In-place unnormalized 3D transform.
fn fft3<T: Real>(data: &mut [Complex<T>], n: usize, inverse: bool) {
    let p = plans::<T>(n);
    let fft = if inverse { &p.inv } else { &p.fwd };
    run_lines(fft, data, n);
    let mut tmp = vec![Complex::new(T::zero(), T::zero()); data.len()];
    // axis 2 has stride n, axis 1 stride n²; gather each into contiguous rows
    for stride in [n, n * n] {
        let base = |line: usize| if stride == n { (line / n) * n * n + line % n } else { line };
        for line in 0..n * n {
            let b = base(line);
            for (m, slot) in tmp[line * n..(line + 1) * n].iter_mut().enumerate() {
                *slot = data[b + m * stride];
            }
        }
        run_lines(fft, &mut tmp, n);
        for line in 0..n * n {
            let b = base(line);
            for (m, &v) in tmp[line * n..(line + 1) * n].iter().enumerate() {
                data[b + m * stride] = v;
            }
        }
    }
}

/// Wave vector data for one Fourier index.
#[derive(Clone, Copy, Debug)]
pub struct Wave<T> {
    /// Signed integer wavenumbers.
    pub m: [isize; 3],
    /// Physical wave vector `m π / L`.
    pub xi: [T; 3],
    /// `xi` with Nyquist components zeroed.
    pub xi_odd: [T; 3],
    pub xi_sq: T,
    pub xi_odd_sq: T,
}

impl<T: Real> Grid3<T> {
    pub fn wave(&self, idx: usize) -> Wave<T> {
        let ijk = self.unidx(idx);
        let k0 = self.k0();
        let half = (self.n() / 2) as isize;
        let mut m = [0isize; 3];
        let mut xi = [T::zero(); 3];
        let mut xo = [T::zero(); 3];
        for a in 0..3 {
            m[a] = self.wavenumber(ijk[a]);
            xi[a] = T::lit(m[a] as f64) * k0;
            xo[a] = if m[a] == -half { T::zero() } else { xi[a] };
        }
        Wave {
            m,
            xi,
            xi_odd: xo,
            xi_sq: xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2],
            xi_odd_sq: xo[0] * xo[0] + xo[1] * xo[1] + xo[2] * xo[2],
        }
    }
}

/// Fourier coefficients of a field on a [`Grid3`], unnormalized forward DFT.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    grid: Grid3<T>,
    data: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn forward(f: &ScalarField<T>) -> Self {
        let mut data: Vec<Complex<T>> = f.data().iter().map(|&v| Complex::new(v, T::zero())).collect();
        fft3(&mut data, f.grid().n(), false);
        Self { grid: *f.grid(), data }
    }

    pub fn zeros(grid: Grid3<T>) -> Self {
        Self { grid, data: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_vec(grid: Grid3<T>, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.grid
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    /// Normalized inverse transform, keeping the imaginary parts.
    pub fn inverse_complex(&self) -> Vec<Complex<T>> {
        let mut data = self.data.clone();
        fft3(&mut data, self.grid.n(), true);
        let s = T::one() / T::from_usize_(self.grid.len());
        for v in data.iter_mut() {
            *v = *v * s;
        }
        data
    }

    /// Real part of the normalized inverse transform.
    pub fn to_real(&self) -> ScalarField<T> {
        let data = self.inverse_complex().into_iter().map(|c| c.re).collect();
        ScalarField::from_vec(self.grid, data).expect("grid length")
    }

    /// Real part plus the largest imaginary residue.
    pub fn to_real_checked(&self) -> (ScalarField<T>, T) {
        let c = self.inverse_complex();
        let imag = c.iter().fold(T::zero(), |m, v| m.max(v.im.abs()));
        let data = c.into_iter().map(|v| v.re).collect();
        (ScalarField::from_vec(self.grid, data).expect("grid length"), imag)
    }

    /// Multiplies each coefficient by `symbol(wave)`.
    pub fn multiply<F: Fn(&Wave<T>) -> Complex<T>>(&self, symbol: F) -> Self {
        let g = self.grid;
        let data = self.data.iter().enumerate().map(|(i, &c)| c * symbol(&g.wave(i))).collect();
        Self { grid: g, data }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&c| c * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { grid: self.grid, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { grid: self.grid, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect() }
    }

    /// Coefficient at the zero mode.
    pub fn mean_mode(&self) -> Complex<T> {
        self.data[0]
    }
}

/// `i ξ_axis` with the Nyquist component dropped.
pub fn derivative_symbol<T: Real>(axis: usize) -> impl Fn(&Wave<T>) -> Complex<T> {
    move |w| Complex::new(T::zero(), w.xi_odd[axis])
}

pub fn derivative<T: Real>(f: &ScalarField<T>, axis: usize) -> ScalarField<T> {
    Spectrum::forward(f).multiply(derivative_symbol(axis)).to_real()
}

pub fn laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    Spectrum::forward(f).multiply(|w| Complex::new(-w.xi_sq, T::zero())).to_real()
}

/// Applies a real-space-to-real-space multiplier in one call.
pub fn apply<T: Real, F: Fn(&Wave<T>) -> Complex<T>>(f: &ScalarField<T>, symbol: F) -> ScalarField<T> {
    Spectrum::forward(f).multiply(symbol).to_real()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_single_mode() {
        let g = Grid3::<f64>::new(8, std::f64::consts::PI).unwrap();
        let f = ScalarField::from_fn(g, |p| (p[0] + 2.0 * p[1] - p[2]).cos() + 0.25);
        let s = Spectrum::forward(&f);
        let back = s.to_real();
        assert!(back.sub(&f).max_abs() < 1e-14);
        // the constant lands in the zero mode
        assert!((s.mean_mode().re / 512.0 - 0.25).abs() < 1e-14);
        let mut big = 0;
        for c in s.data() {
            if c.norm() > 1e-9 {
                big += 1;
            }
        }
        assert_eq!(big, 3);
    }

    #[test]
    fn axis_ordering() {
        let g = Grid3::<f64>::new(16, std::f64::consts::PI).unwrap();
        for axis in 0..3 {
            let f = ScalarField::from_fn(g, |p| (3.0 * p[axis]).sin());
            let d = derivative(&f, axis);
            let want = ScalarField::from_fn(g, |p| 3.0 * (3.0 * p[axis]).cos());
            assert!(d.sub(&want).max_abs() < 1e-12, "axis {axis}");
        }
    }

    #[test]
    fn f32_transform() {
        let g = Grid3::<f32>::new(8, std::f32::consts::PI).unwrap();
        let f = ScalarField::from_fn(g, |p| p[0].sin());
        let d = derivative(&f, 0);
        let want = ScalarField::from_fn(g, |p| p[0].cos());
        assert!(d.sub(&want).max_abs() < 1e-5);
    }
}
