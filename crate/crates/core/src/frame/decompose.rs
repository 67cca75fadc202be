use super::FramedField;
use crate::error::{Error, Result};
use crate::grid::{ScalarField, VectorField3};
use crate::nlc::{nlc_functional, FunctionalReport, VSpace};
use crate::real::Real;

/// `u = U + r` with `U` a symmetric flow in `y₃`, plus `∂₃U` and `∂₃r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T: Real> {
    pub sym: VectorField3<T>,
    pub rem: VectorField3<T>,
    pub d3_sym: VectorField3<T>,
    pub d3_rem: VectorField3<T>,
    /// Cutoff radius when `U` was windowed.
    pub window: Option<T>,
}

/// Odd for the two transverse components, even for the axial one.
const U_EVEN: [bool; 3] = [false, false, true];

impl<T: Real> Decomposition<T> {
    /// `U = u`, `r = 0`.
    pub fn symmetric_only(u: VectorField3<T>, du3: VectorField3<T>) -> Self {
        let g = *u.grid();
        Self { sym: u, rem: VectorField3::zeros(g), d3_sym: du3, d3_rem: VectorField3::zeros(g), window: None }
    }

    /// `U = 0`, `r = u`.
    pub fn remainder_only(u: VectorField3<T>, du3: VectorField3<T>) -> Self {
        let g = *u.grid();
        Self { sym: VectorField3::zeros(g), rem: u, d3_sym: VectorField3::zeros(g), d3_rem: du3, window: None }
    }

    pub fn total(&self) -> VectorField3<T> {
        self.sym.add(&self.rem)
    }

    /// `max |u - (U + r)|` over nodes and components.
    pub fn reconstruction_defect(&self, u: &VectorField3<T>) -> T {
        u.sub(&self.total()).max_abs()
    }

    /// Largest distance of `U` from the symmetric-flow parities.
    pub fn parity_defect(&self) -> T {
        (0..3).fold(T::zero(), |d, k| d.max(self.sym.component(k).parity_defect(U_EVEN[k])))
    }

    /// Scales `U` and `r` together.
    pub fn scale(&self, c: T) -> Self {
        Self {
            sym: self.sym.scale(c),
            rem: self.rem.scale(c),
            d3_sym: self.d3_sym.scale(c),
            d3_rem: self.d3_rem.scale(c),
            window: self.window,
        }
    }
}

/// The parity projection: `U₁, U₂` the odd parts of `u₁, u₂` in `y₃`, `U₃` the even part of `u₃`.
pub fn symmetrize<T: Real>(u: &FramedField<T>) -> Decomposition<T> {
    let sym = VectorField3::from_components(std::array::from_fn(|k| u.u.component(k).parity_part(U_EVEN[k])));
    let rem = u.u.sub(&sym);
    // ∂₃ flips parity; a component of r that vanishes node-wise keeps ∂₃r = 0
    let d3_sym = VectorField3::from_components(std::array::from_fn(|k| {
        if rem.component(k).max_abs() == T::zero() {
            u.du3.component(k).clone()
        } else {
            u.du3.component(k).parity_part(!U_EVEN[k])
        }
    }));
    let d3_rem = u.du3.sub(&d3_sym);
    Decomposition { sym, rem, d3_sym, d3_rem, window: None }
}

fn smooth_step<T: Real>(t: T) -> (T, T) {
    // S(t) = ψ(t)/(ψ(t)+ψ(1-t)), ψ(t) = exp(-1/t)
    if t <= T::zero() {
        return (T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::one(), T::zero());
    }
    let s = T::one() - t;
    let a = (-T::one() / t).exp();
    let b = (-T::one() / s).exp();
    let da = a / (t * t);
    let db = -b / (s * s);
    let den = a + b;
    (a / den, (da * den - a * (da + db)) / (den * den))
}

/// Radial cutoff equal to 1 on `B(0, radius)` and 0 outside `B(0, 2 radius)`, with `∂₃χ`.
pub fn window_cutoff<T: Real>(grid: &crate::grid::Grid3<T>, radius: T) -> Result<(ScalarField<T>, ScalarField<T>)> {
    if !(radius > T::zero()) {
        return Err(Error::Window(format!("radius must be positive, got {radius}")));
    }
    if T::lit(2.0) * radius >= grid.l() {
        return Err(Error::Window(format!("2 x radius = {} reaches the box half-width {}", T::lit(2.0) * radius, grid.l())));
    }
    let vals: Vec<(T, T)> = (0..grid.len())
        .map(|idx| {
            let y = grid.point(idx);
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            let (s, ds) = smooth_step((r - radius) / radius);
            let chi = T::one() - s;
            let d3 = if r > T::zero() { -ds / radius * y[2] / r } else { T::zero() };
            (chi, d3)
        })
        .collect();
    let chi = ScalarField::from_vec(*grid, vals.iter().map(|v| v.0).collect())?;
    let d3 = ScalarField::from_vec(*grid, vals.iter().map(|v| v.1).collect())?;
    Ok((chi, d3))
}

/// `U = χ·(parity projection of u)` with a smooth radial cutoff `χ`; `r = u - U`.
pub fn windowed_symmetrize<T: Real>(u: &FramedField<T>, radius: T) -> Result<Decomposition<T>> {
    let (chi, d3chi) = window_cutoff(u.grid(), radius)?;
    let p = symmetrize(u);
    let sym = p.sym.map_components(|c| c.mul(&chi));
    let d3_sym = VectorField3::from_components(std::array::from_fn(|k| {
        p.d3_sym.component(k).mul(&chi).add(&p.sym.component(k).mul(&d3chi))
    }));
    let rem = u.u.sub(&sym);
    let d3_rem = u.du3.sub(&d3_sym);
    Ok(Decomposition { sym, rem, d3_sym, d3_rem, window: Some(radius) })
}

/// The candidate that won plus every candidate's functional.
#[derive(Clone, Debug)]
pub struct InfimumReport<T: Real> {
    pub decomposition: Decomposition<T>,
    pub functional: FunctionalReport<T>,
    /// `(window radius, functional)` per candidate, unwindowed first.
    pub candidates: Vec<(Option<T>, T)>,
}

/// Minimizes the functional over the unwindowed projection and one windowed
/// projection per radius. Ties keep the earlier candidate.
///
/// This is an upper bound for the infimum over all decompositions.
pub fn infimize_nlc<T: Real>(u: &FramedField<T>, space: &VSpace<T>, radii: &[T]) -> Result<InfimumReport<T>> {
    let first = symmetrize(u);
    let f0 = nlc_functional(&first, space)?;
    let mut candidates = vec![(None, f0.value)];
    let mut best = (first, f0);
    for &r in radii {
        let d = windowed_symmetrize(u, r)?;
        let f = nlc_functional(&d, space)?;
        candidates.push((Some(r), f.value));
        if f.value < best.1.value {
            best = (d, f);
        }
    }
    Ok(InfimumReport { decomposition: best.0, functional: best.1, candidates })
}

/// Rounds each reflected pair `(a, b)` so that `(a ± b)/2` and `a, b` are all
/// exactly representable, which makes the parity split exact.
///
/// The change per value is at most a few units in the last place of the pair's
/// magnitude.
pub fn round_parity_pairs<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let g = *f.grid();
    let n = g.n();
    let mut out = f.data().to_vec();
    let two = T::lit(2.0);
    for idx in 0..g.len() {
        let [i, j, k] = g.unidx(idx);
        let kr = (n - k) % n;
        if kr <= k {
            continue;
        }
        let ridx = g.idx(i, j, kr);
        let (a, b) = (out[idx], out[ridx]);
        let half = T::lit(0.5);
        let e = half * (a + b);
        let o = half * (a - b);
        let m = e.abs().max(o.abs());
        if m == T::zero() || !m.is_finite() {
            continue;
        }
        let q = two.powi(m.log2().ceil().to_i32().unwrap_or(0)) * T::epsilon() * T::lit(4.0);
        let e = (e / q).round() * q;
        let o = (o / q).round() * q;
        out[idx] = e + o;
        out[ridx] = e - o;
    }
    ScalarField::from_vec(g, out).expect("grid length")
}
