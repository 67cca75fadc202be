//! Riesz transforms and other Fourier multipliers, plus kernel-quadrature
//! versions of the truncated and modified transforms.
//!
//! Axes are 0-based in this API (`0, 1, 2` for `x₁, x₂, x₃`).

mod invariants;
pub mod kernel;
mod parity;

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::spectral::{Spectrum, Wave};
use crate::grid::{Grid3, ScalarField};
use crate::real::Real;

pub use kernel::{check_kernel_conditions, KernelReport, KernelSamples, TruncatedKernelOp};
pub use invariants::{riesz_invariants, InvariantRow};
pub use parity::{parity_check, Parity, ParityReport};

type Symbol<T> = Arc<dyn Fn(&Wave<T>) -> Complex<T> + Send + Sync>;

/// A Fourier multiplier with an explicit value at the zero mode.
#[derive(Clone)]
pub struct MultiplierOp<T: Real> {
    symbol: Symbol<T>,
    pub zero_mode: Complex<T>,
}

impl<T: Real> fmt::Debug for MultiplierOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOp").field("zero_mode", &self.zero_mode).finish_non_exhaustive()
    }
}

impl<T: Real> MultiplierOp<T> {
    pub fn new<F>(symbol: F) -> Self
    where
        F: Fn(&Wave<T>) -> Complex<T> + Send + Sync + 'static,
    {
        Self { symbol: Arc::new(symbol), zero_mode: Complex::new(T::zero(), T::zero()) }
    }

    /// `R_j`: symbol `-i ξ_j / |ξ|`.
    pub fn riesz(axis: usize) -> Self {
        Self::new(move |w: &Wave<T>| {
            if w.xi_odd_sq == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::zero(), -w.xi_odd[axis] / w.xi_odd_sq.sqrt())
            }
        })
    }

    /// `R_i R_j`: symbol `-ξ_i ξ_j / |ξ|²`.
    pub fn riesz_pair(i: usize, j: usize) -> Self {
        Self::new(move |w: &Wave<T>| {
            if w.xi_odd_sq == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(-w.xi_odd[i] * w.xi_odd[j] / w.xi_odd_sq, T::zero())
            }
        })
    }

    pub fn symbol(&self, w: &Wave<T>) -> Complex<T> {
        if w.m == [0, 0, 0] {
            self.zero_mode
        } else {
            (self.symbol)(w)
        }
    }

    pub fn apply_spectrum(&self, s: &Spectrum<T>) -> Spectrum<T> {
        s.multiply(|w| self.symbol(w))
    }

    pub fn apply(&self, f: &ScalarField<T>) -> ScalarField<T> {
        self.apply_spectrum(&Spectrum::forward(f)).to_real()
    }

    /// Output together with the largest imaginary residue of the inverse transform.
    pub fn apply_checked(&self, f: &ScalarField<T>) -> (ScalarField<T>, T) {
        self.apply_spectrum(&Spectrum::forward(f)).to_real_checked()
    }
}

fn check_axis(axis: usize) {
    assert!(axis < 3, "axis {axis} out of range");
}

/// Spectral `R_j f`.
pub fn riesz<T: Real>(f: &ScalarField<T>, axis: usize) -> ScalarField<T> {
    check_axis(axis);
    MultiplierOp::riesz(axis).apply(f)
}

/// Spectral `R_i R_j f`.
pub fn riesz_pair<T: Real>(f: &ScalarField<T>, i: usize, j: usize) -> ScalarField<T> {
    check_axis(i);
    check_axis(j);
    MultiplierOp::riesz_pair(i, j).apply(f)
}

/// `c₃ = Γ(2) π⁻² = π⁻²`.
pub fn c3<T: Real>() -> T {
    T::one() / (T::PI() * T::PI())
}

/// Output of a kernel-quadrature transform.
#[derive(Clone, Debug)]
pub struct TruncatedResult<T> {
    pub field: ScalarField<T>,
    /// First-order size of the excised core, `c₃ (4π/3) ε max|∂_j f|`.
    pub core_estimate: T,
    /// Largest contribution the kernel could pick up beyond the box, `c₃ ‖f‖₁ / L³`.
    pub box_estimate: T,
}

impl<T: Real> TruncatedResult<T> {
    pub fn tail_estimate(&self) -> T {
        self.core_estimate + self.box_estimate
    }
}

/// Riesz kernel sampled at minimum-image offsets, zero inside `B(0, ε)` and on the antipodal seam.
fn truncated_kernel<T: Real>(g: &Grid3<T>, axis: usize, eps: T) -> ScalarField<T> {
    let n = g.n();
    let c = c3::<T>();
    let h = g.h();
    ScalarField::from_vec(
        *g,
        (0..g.len())
            .map(|idx| {
                let ijk = g.unidx(idx);
                if ijk[axis] == n / 2 {
                    return T::zero();
                }
                let z: Vec<T> = ijk.iter().map(|&k| T::lit(g.wavenumber(k) as f64) * h).collect();
                let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
                if r2 < eps * eps {
                    return T::zero();
                }
                c * z[axis] / (r2 * r2)
            })
            .collect(),
    )
    .expect("grid length")
}

/// Midpoint quadrature of `c₃ ∫_{|x-y| ≥ ε} (x_j - y_j)/|x - y|⁴ f(y) dy` over the periodic box.
pub fn riesz_truncated<T: Real>(f: &ScalarField<T>, axis: usize, eps: T) -> Result<TruncatedResult<T>> {
    check_axis(axis);
    let g = *f.grid();
    if eps < T::lit(2.0) * g.h() * (T::one() - T::lit(1e-12)) {
        return Err(Error::Resolution(format!("eps = {eps} is below 2h = {}", T::lit(2.0) * g.h())));
    }
    let k = Spectrum::forward(&truncated_kernel(&g, axis, eps));
    let field = Spectrum::forward(f)
        .multiply(|_| Complex::new(g.cell_volume(), T::zero()))
        .data()
        .iter()
        .zip(k.data())
        .map(|(&a, &b)| a * b)
        .collect::<Vec<_>>();
    let field = Spectrum::from_vec(g, field).to_real();
    let d = f.derivative(axis, crate::grid::DiffMethod::Spectral).max_abs();
    let c = c3::<T>();
    let core_estimate = c * T::lit(4.0 / 3.0) * T::PI() * eps * d;
    let l1 = f.data().iter().fold(T::zero(), |s, v| s + v.abs()) * g.cell_volume();
    let box_estimate = c * l1 / (g.l() * g.l() * g.l());
    Ok(TruncatedResult { field, core_estimate, box_estimate })
}

/// `c₃ ∫_{|x-y|≥ε} [(x_j - y_j)/|x-y|⁴ - (-y_j)(1 - χ_{B(0,1)}(y))/|y|⁴] f(y) dy`.
///
/// The subtracted term does not depend on `x`, so this is the truncated
/// transform shifted by one constant.
pub fn modified_riesz<T: Real>(f: &ScalarField<T>, axis: usize, eps: T) -> Result<TruncatedResult<T>> {
    let mut out = riesz_truncated(f, axis, eps)?;
    let shift = modified_shift(f, axis);
    out.field = out.field.map(|v| v - shift);
    Ok(out)
}

/// `c₃ ∫ (-y_j)(1 - χ_{B(0,1)}(y))/|y|⁴ f(y) dy` over the box nodes.
///
/// The plane `y_j = -L` is skipped, as in the truncated kernel, so the
/// quadrature stays odd in `y_j`.
pub fn modified_shift<T: Real>(f: &ScalarField<T>, axis: usize) -> T {
    let g = f.grid();
    let c = c3::<T>();
    let mut s = T::zero();
    for (idx, &v) in f.data().iter().enumerate() {
        if g.unidx(idx)[axis] == 0 {
            continue;
        }
        let y = g.point(idx);
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if r2 < T::one() {
            continue;
        }
        s = s + (-y[axis]) / (r2 * r2) * v;
    }
    c * s * g.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid3<f64> {
        Grid3::new(16, PI).unwrap()
    }

    #[test]
    fn riesz_of_sine() {
        let g = grid();
        let f = ScalarField::from_fn(g, |p| p[0].sin());
        let r = riesz(&f, 0);
        let want = ScalarField::from_fn(g, |p| -p[0].cos());
        assert!(r.sub(&want).max_abs() < 1e-12);
        assert_eq!(riesz(&ScalarField::constant(g, 4.0), 1).max_abs(), 0.0);
    }

    #[test]
    fn sum_of_squares_is_minus_identity() {
        let g = grid();
        let f = ScalarField::from_fn(g, |p| (p[0] + 2.0 * p[1]).sin() + (3.0 * p[2] - p[0]).cos() * 0.5);
        let mut acc = ScalarField::zeros(g);
        for j in 0..3 {
            acc = acc.add(&riesz(&riesz(&f, j), j));
        }
        assert!(acc.add(&f).max_abs() < 1e-12);
        let mut tr = ScalarField::zeros(g);
        for j in 0..3 {
            tr = tr.add(&riesz_pair(&f, j, j));
        }
        assert!(tr.add(&f).max_abs() < 1e-12);
    }

    #[test]
    fn pair_symbol() {
        let g = grid();
        let f = ScalarField::from_fn(g, |p| (p[0] + p[1]).sin());
        let r = riesz_pair(&f, 0, 1);
        assert!(r.add(&f.scale(0.5)).max_abs() < 1e-12);
        assert_eq!(riesz_pair(&f, 0, 1), riesz_pair(&f, 1, 0));
        let composed = riesz(&riesz(&f, 0), 1);
        assert!(composed.sub(&r).max_abs() < 1e-12);
    }

    #[test]
    fn truncated_resolution_guard() {
        let g = grid();
        let f = ScalarField::zeros(g);
        assert!(matches!(riesz_truncated(&f, 0, g.h()), Err(Error::Resolution(_))));
        assert_eq!(riesz_truncated(&f, 0, 2.0 * g.h()).unwrap().field.max_abs(), 0.0);
    }

    #[test]
    fn modified_of_constant_vanishes_at_origin() {
        let g = Grid3::new(32, 2.0 * PI).unwrap();
        let one = ScalarField::constant(g, 1.0);
        for axis in 0..3 {
            let r = modified_riesz(&one, axis, 2.0 * g.h()).unwrap();
            assert!(r.field.at_origin().abs() <= 1e-3);
        }
    }

    #[test]
    fn modified_minus_truncated_is_constant() {
        let g = Grid3::new(16, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(g, |p| (-((p[0] - 3.0).powi(2) + p[1] * p[1] + p[2] * p[2])).exp());
        let a = riesz_truncated(&f, 0, 2.0 * g.h()).unwrap().field;
        let b = modified_riesz(&f, 0, 2.0 * g.h()).unwrap().field;
        let d = a.sub(&b);
        let c = d.data()[0];
        assert!(d.data().iter().all(|v| (v - c).abs() < 1e-15));
        assert!(c.abs() > 0.0);
    }
}

#[cfg(test)]
mod agreement {
    use super::*;
    use crate::grid::DiffMethod;
    use std::f64::consts::PI;

    fn bump(g: Grid3<f64>) -> ScalarField<f64> {
        ScalarField::from_fn(g, |p| (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.5).exp())
    }

    #[test]
    fn truncated_error_within_tail_estimate() {
        for n in [32usize, 64] {
            let g = Grid3::new(n, 2.0 * PI).unwrap();
            let f = bump(g);
            let s = riesz(&f, 0);
            let t = riesz_truncated(&f, 0, 2.0 * g.h()).unwrap();
            assert!(t.field.sub(&s).max_abs() <= t.tail_estimate());
        }
    }

    #[test]
    fn core_corrected_truncation_agrees_with_spectral() {
        let g = Grid3::new(64, 2.0 * PI).unwrap();
        let f = bump(g);
        let s = riesz(&f, 0);
        let eps = 2.0 * g.h();
        let t = riesz_truncated(&f, 0, eps).unwrap().field;
        let core = f.derivative(0, DiffMethod::Spectral).scale(c3::<f64>() * 4.0 * PI / 3.0 * eps);
        assert!(t.sub(&core).sub(&s).max_abs() <= 0.05 * s.max_abs());
    }
}
