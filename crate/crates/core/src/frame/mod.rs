//! Maximum points, the `{n₁, n₂, τ}` frame, resampling into frame
//! coordinates, and the symmetric/remainder split of a framed field.

mod counterexample;
mod decompose;
mod resample;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid3, ScalarField, VectorField3};
use crate::real::{cross3, dot3, norm3, Real};

pub use counterexample::{counterexample_field, origin_vorticity, AngularProfile};
pub use decompose::{infimize_nlc, round_parity_pairs, symmetrize, window_cutoff, windowed_symmetrize, Decomposition, InfimumReport};
pub use resample::Resample;

/// Relative tie tolerance used when the caller has no preference.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxPoint<T> {
    pub index: usize,
    pub location: [T; 3],
    pub speed: T,
    pub time: T,
}

/// Every node with `|v| ≥ (1 - tie_tol) max|v|`, in index order.
pub fn find_max_points<T: Real>(v: &VectorField3<T>, tie_tol: T, time: T) -> Result<Vec<MaxPoint<T>>> {
    if !v.is_finite() {
        return Err(Error::Domain("velocity contains non-finite values".into()));
    }
    let speed = v.magnitude();
    let max = speed.max_abs();
    if max == T::zero() {
        return Err(Error::NoMaximum);
    }
    let cut = (T::one() - tie_tol) * max;
    let g = v.grid();
    Ok(speed
        .data()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= cut)
        .map(|(index, &s)| MaxPoint { index, location: g.point(index), speed: s, time })
        .collect())
}

/// The canonical maximum point: lowest index among the ties.
pub fn canonical_max_point<T: Real>(v: &VectorField3<T>, time: T) -> Result<MaxPoint<T>> {
    Ok(find_max_points(v, T::lit(DEFAULT_TIE_TOL), time)?[0])
}

/// Orthonormal right-handed frame with `τ` along the velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Frame<T> {
    pub tau: [T; 3],
    pub n1: [T; 3],
    pub n2: [T; 3],
}

impl<T: Real> Frame<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { n1: [o, z, z], n2: [z, o, z], tau: [z, z, o] }
    }

    /// `τ = w/|w|`, `n₁` from the basis vector least aligned with `τ`, `n₂ = τ × n₁`.
    pub fn from_direction(w: [T; 3]) -> Result<Self> {
        let s = norm3(&w);
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::Degenerate(format!("velocity {s} at the maximum point")));
        }
        let tau = [w[0] / s, w[1] / s, w[2] / s];
        let mut a = 0;
        for b in 1..3 {
            if tau[b].abs() < tau[a].abs() {
                a = b;
            }
        }
        let mut e = [T::zero(); 3];
        e[a] = T::one();
        let d = tau[a];
        let m = [e[0] - d * tau[0], e[1] - d * tau[1], e[2] - d * tau[2]];
        let mn = norm3(&m);
        let n1 = [m[0] / mn, m[1] / mn, m[2] / mn];
        let n2 = cross3(&tau, &n1);
        Ok(Self { tau, n1, n2 })
    }

    /// Axes in `y`-order: `n₁, n₂, τ`.
    pub fn axes(&self) -> [[T; 3]; 3] {
        [self.n1, self.n2, self.tau]
    }

    /// `n₁y₁ + n₂y₂ + τy₃`.
    pub fn to_world(&self, y: [T; 3]) -> [T; 3] {
        let a = self.axes();
        std::array::from_fn(|c| a[0][c] * y[0] + a[1][c] * y[1] + a[2][c] * y[2])
    }

    /// Components of `w` along `n₁, n₂, τ`.
    pub fn project(&self, w: [T; 3]) -> [T; 3] {
        self.axes().map(|e| dot3(&e, &w))
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let a = self.axes();
        let mut d = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { T::one() } else { T::zero() };
                d = d.max((dot3(&a[i], &a[j]) - want).abs());
            }
        }
        d
    }

    /// `max |n₁ × n₂ - τ|`.
    pub fn handedness_defect(&self) -> T {
        let c = cross3(&self.n1, &self.n2);
        (0..3).fold(T::zero(), |d, i| d.max((c[i] - self.tau[i]).abs()))
    }

    /// The axis permutation and signs when every axis is a signed basis vector.
    pub(crate) fn signed_permutation(&self) -> Option<[(usize, bool); 3]> {
        let mut out = [(0, false); 3];
        for (k, e) in self.axes().iter().enumerate() {
            let nz: Vec<usize> = (0..3).filter(|&c| e[c] != T::zero()).collect();
            if nz.len() != 1 || e[nz[0]].abs() != T::one() {
                return None;
            }
            out[k] = (nz[0], e[nz[0]] < T::zero());
        }
        Some(out)
    }
}

/// Frame at node `x_m` of `v`.
pub fn build_frame<T: Real>(v: &VectorField3<T>, x_m: usize) -> Result<Frame<T>> {
    Frame::from_direction(v.at(x_m))
}

/// Velocity in frame coordinates, `u_k(y) = v(x_M + n₁y₁ + n₂y₂ + τy₃)·e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramedField<T: Real> {
    pub u: VectorField3<T>,
    /// `∂u/∂y₃`, from `(τ·∇)v` on the source grid.
    pub du3: VectorField3<T>,
    pub frame: Frame<T>,
    pub origin: [T; 3],
    pub time: T,
}

impl<T: Real> FramedField<T> {
    /// A field that already lives in `y`-coordinates. `∂₃` is spectral.
    pub fn from_y_field(u: VectorField3<T>, time: T) -> Self {
        let du3 = u.map_components(|c| c.derivative(2, crate::grid::DiffMethod::Spectral));
        Self { u, du3, frame: Frame::identity(), origin: [T::zero(); 3], time }
    }

    pub fn grid(&self) -> &Grid3<T> {
        self.u.grid()
    }

    /// `u(0)`.
    pub fn at_origin(&self) -> [T; 3] {
        self.u.at(self.grid().origin_index())
    }
}

/// Resamples `v` around node `x_m` into the coordinates of `frame`.
///
/// Frames made of signed basis vectors permute nodes exactly. Otherwise the
/// interpolated values are passed through [`round_parity_pairs`], so that the
/// parity split of the result is exact.
pub fn to_frame<T: Real>(v: &VectorField3<T>, frame: &Frame<T>, x_m: usize, method: Resample, time: T) -> FramedField<T> {
    let g = *v.grid();
    let dv: [ScalarField<T>; 3] = std::array::from_fn(|a| {
        let grad = v.component(a).gradient(crate::grid::DiffMethod::Spectral);
        grad.component(0)
            .scale(frame.tau[0])
            .add(&grad.component(1).scale(frame.tau[1]))
            .add(&grad.component(2).scale(frame.tau[2]))
    });
    let dv = VectorField3::from_components(dv);
    let origin = g.point(x_m);
    let (u, du3) = resample::resample_pair(v, &dv, frame, x_m, method);
    let (u, du3) = if frame.signed_permutation().is_some() {
        (u, du3)
    } else {
        (u.map_components(round_parity_pairs), du3.map_components(round_parity_pairs))
    };
    FramedField { u, du3, frame: *frame, origin, time }
}

/// Finds the canonical maximum point of `v`, builds its frame and resamples.
pub fn frame_at_max<T: Real>(v: &VectorField3<T>, method: Resample, time: T) -> Result<(MaxPoint<T>, FramedField<T>)> {
    let m = canonical_max_point(v, time)?;
    let frame = build_frame(v, m.index)?;
    Ok((m, to_frame(v, &frame, m.index, method, time)))
}
