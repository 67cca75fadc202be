use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DiffMethod, Grid3, VectorField3};
use crate::real::Real;

/// `u = |u|(sin θ₁, sin θ₂, cos θ₃)` with a Gaussian `|u|`.
///
/// `θ₁ = λ y₃ exp(-|y|²/2w²)` and `θ₃ = (1 + gain) θ₁`; `θ₂` is fixed by
/// `sin²θ₂ = 1 - sin²θ₁ - cos²θ₃` with the sign of `y₃`, so `|u|` is exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AngularProfile<T> {
    pub amplitude: T,
    pub width: T,
    pub lambda: T,
    #[serde(default)]
    pub theta3_gain: T,
}

impl<T: Real> AngularProfile<T> {
    pub fn new(amplitude: T, width: T, lambda: T) -> Self {
        Self { amplitude, width, lambda, theta3_gain: T::zero() }
    }

    /// Box with `L = 8w`, where the bump is below `e^{-32}` on the boundary.
    pub fn default_grid(&self, n: usize) -> Result<Grid3<T>> {
        Grid3::new(n, T::lit(8.0) * self.width)
    }

    pub fn magnitude(&self, y: [T; 3]) -> T {
        self.amplitude * self.gauss(y)
    }

    fn gauss(&self, y: [T; 3]) -> T {
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        (-r2 / (T::lit(2.0) * self.width * self.width)).exp()
    }

    pub fn theta1(&self, y: [T; 3]) -> T {
        self.lambda * y[2] * self.gauss(y)
    }

    pub fn theta3(&self, y: [T; 3]) -> T {
        (T::one() + self.theta3_gain) * self.theta1(y)
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude > T::zero()) || !(self.width > T::zero()) {
            return Err(Error::Profile("amplitude and width must be positive".into()));
        }
        if !self.lambda.is_finite() || !(self.theta3_gain >= T::zero()) {
            return Err(Error::Profile("lambda must be finite and theta3 gain non-negative".into()));
        }
        Ok(())
    }
}

/// Samples the profile on `grid`. The transverse components are set to zero
/// on the seam plane `y₃ = -L`, as for any periodic function odd in `y₃`.
pub fn counterexample_field<T: Real>(grid: &Grid3<T>, profile: &AngularProfile<T>) -> Result<VectorField3<T>> {
    profile.validate()?;
    let slack = T::lit(1e-12);
    let mut bad = false;
    let vals: Vec<[T; 3]> = (0..grid.len())
        .map(|idx| {
            let y = grid.point(idx);
            let m = profile.magnitude(y);
            let s1 = profile.theta1(y).sin();
            let c3 = profile.theta3(y).cos();
            let rest = T::one() - s1 * s1 - c3 * c3;
            if rest < -slack {
                bad = true;
            }
            let s2 = rest.max(T::zero()).sqrt();
            let s2 = if y[2] > T::zero() {
                s2
            } else if y[2] < T::zero() {
                -s2
            } else {
                T::zero()
            };
            if grid.unidx(idx)[2] == 0 {
                [T::zero(), T::zero(), m * c3]
            } else {
                [m * s1, m * s2, m * c3]
            }
        })
        .collect();
    if bad {
        return Err(Error::Profile("sin²θ₁ + cos²θ₃ exceeds 1 somewhere".into()));
    }
    let comps = std::array::from_fn(|k| crate::grid::ScalarField::from_vec(*grid, vals.iter().map(|v| v[k]).collect()).expect("grid length"));
    Ok(VectorField3::from_components(comps))
}

/// Spectral `curl u` at the origin node.
pub fn origin_vorticity<T: Real>(u: &VectorField3<T>) -> [T; 3] {
    u.curl(DiffMethod::Spectral).at(u.grid().origin_index())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{symmetrize, FramedField};

    fn fd4_d3(u: &VectorField3<f64>, comp: usize, axis: usize) -> f64 {
        let g = u.grid();
        let o = g.unidx(g.origin_index());
        let at = |s: isize| {
            let mut off = [0isize; 3];
            off[axis] = s;
            u.component(comp).data()[g.wrap_idx(o, off)]
        };
        (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * g.h())
    }

    #[test]
    fn curl_at_origin_scales_with_lambda() {
        let mut prev: Option<f64> = None;
        for lambda in [1.0, 10.0, 100.0] {
            let p = AngularProfile::<f64>::new(1.0, 0.006, lambda);
            let g = p.default_grid(64).unwrap();
            let u = counterexample_field(&g, &p).unwrap();
            let fd = fd4_d3(&u, 0, 2) - fd4_d3(&u, 2, 0);
            assert!((fd - lambda).abs() <= 1e-2 * lambda, "{lambda}: {fd}");
            let w = origin_vorticity(&u)[1];
            assert!((w - lambda).abs() <= 1e-6 * lambda, "{lambda}: {w}");
            if let Some(q) = prev {
                assert!((w / q - 10.0).abs() <= 0.1);
            }
            prev = Some(w);
        }
    }

    #[test]
    fn counterexample_is_symmetric() {
        let p = AngularProfile::<f64>::new(2.0, 0.01, 10.0);
        let g = p.default_grid(32).unwrap();
        let u = counterexample_field(&g, &p).unwrap();
        let d = symmetrize(&FramedField::from_y_field(u.clone(), 0.0));
        assert_eq!(d.rem.max_abs(), 0.0);
        assert_eq!(u.at(g.origin_index()), [0.0, 0.0, 2.0]);
        let zero = counterexample_field(&g, &AngularProfile::new(2.0, 0.01, 0.0)).unwrap();
        assert!(origin_vorticity(&zero)[1].abs() <= 1e-12);
    }

    #[test]
    fn gain_keeps_magnitude() {
        let p = AngularProfile { theta3_gain: 0.5, ..AngularProfile::<f64>::new(1.0, 0.01, 20.0) };
        let g = p.default_grid(16).unwrap();
        let u = counterexample_field(&g, &p).unwrap();
        let speed = u.magnitude();
        for idx in 0..g.len() {
            if g.unidx(idx)[2] != 0 {
                assert!((speed.data()[idx] - p.magnitude(g.point(idx))).abs() < 1e-14);
            }
        }
        assert!(matches!(counterexample_field(&g, &AngularProfile::new(0.0, 0.01, 1.0)), Err(Error::Profile(_))));
    }
}
