//! The no-local-collapsing functional and its threshold, the axial pressure
//! derivative at the maximum point, the maximum-point inequalities, and the
//! BKM and decay diagnostics.

pub mod monitor;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Decomposition, Frame, MaxPoint, Resample};
use crate::grid::spectral::Spectrum;
use crate::grid::{fd_laplacian_at, sample_balls, BallStrategy, DiffMethod, Grid3, ScalarField, VectorField3};
use crate::growth::{GrowthConfig, GrowthFunction};
use crate::norms::{pointed_campanato_norm, Argmax, NormReport, PreparedFamily};
use crate::real::Real;

pub use monitor::{load_series, monitor_run, write_csv, MonitorOutcome, MonitorRow, CSV_HEADER};

/// The space `V`: a pointed Campanato norm with exponent `p`, growth `phi` and a ball family.
#[derive(Clone, Debug)]
pub struct VSpace<T: Real> {
    pub p: T,
    pub phi: GrowthFunction<T>,
    pub family: PreparedFamily<T>,
}

impl<T: Real> VSpace<T> {
    pub fn new(grid: &Grid3<T>, p: T, phi: GrowthFunction<T>, balls: &BallStrategy<T>) -> Result<Self> {
        if !(p >= T::one()) {
            return Err(Error::Config(format!("p must be at least 1, got {p}")));
        }
        let family = PreparedFamily::new(grid, &sample_balls(grid, balls)?)?;
        Ok(Self { p, phi, family })
    }

    /// `‖f‖_V`; the zero field short-circuits to 0.
    pub fn norm(&self, f: &ScalarField<T>) -> Result<NormReport<T>> {
        if f.max_abs() == T::zero() {
            return Ok(NormReport {
                value: T::zero(),
                seminorm: T::zero(),
                argmax: Argmax::None,
                argmax_index: None,
                family: self.family.family().descriptor.clone(),
                point_term: Some(T::zero()),
            });
        }
        pointed_campanato_norm(f, self.p, &self.phi, &self.family)
    }
}

/// The twelve norms behind the functional. `U`-side norms are skipped when
/// every product they enter has a vanishing `r`-side factor.
#[derive(Clone, Debug)]
pub struct FunctionalReport<T: Real> {
    pub value: T,
    pub rem: [NormReport<T>; 3],
    pub d3_rem: [NormReport<T>; 3],
    pub sym: [Option<NormReport<T>>; 3],
    pub d3_sym: [Option<NormReport<T>>; 3],
}

impl<T: Real> FunctionalReport<T> {
    /// Recomputes the triple sum from the stored reports.
    pub fn assemble(&self) -> T {
        let v = |r: &Option<NormReport<T>>| r.as_ref().map_or(T::zero(), |r| r.value);
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + self.d3_rem[i].value * v(&self.sym[j])
                    + self.rem[i].value * v(&self.d3_sym[j])
                    + self.rem[i].value * self.d3_rem[j].value;
            }
        }
        s
    }
}

/// `Σ_{i,j} ‖∂₃r_i‖‖U_j‖ + ‖r_i‖‖∂₃U_j‖ + ‖r_i‖‖∂₃r_j‖` in `V`.
pub fn nlc_functional<T: Real>(dec: &Decomposition<T>, space: &VSpace<T>) -> Result<FunctionalReport<T>> {
    let norms3 = |f: &VectorField3<T>| -> Result<[NormReport<T>; 3]> {
        Ok([space.norm(f.component(0))?, space.norm(f.component(1))?, space.norm(f.component(2))?])
    };
    let rem = norms3(&dec.rem)?;
    let d3_rem = norms3(&dec.d3_rem)?;
    let any = |r: &[NormReport<T>; 3]| r.iter().any(|n| n.value != T::zero());
    let sym = if any(&d3_rem) {
        norms3(&dec.sym)?.map(Some)
    } else {
        [None, None, None]
    };
    let d3_sym = if any(&rem) {
        norms3(&dec.d3_sym)?.map(Some)
    } else {
        [None, None, None]
    };
    let mut rep = FunctionalReport { value: T::zero(), rem, d3_rem, sym, d3_sym };
    rep.value = rep.assemble();
    Ok(rep)
}

/// `C (T - t)^{-α} / u₃(0, t)`.
pub fn threshold<T: Real>(c: T, alpha: T, t_blowup: T, t: T, u3_origin: T) -> Result<T> {
    if !(t < t_blowup) {
        return Err(Error::Domain(format!("t = {t} is not before T = {t_blowup}")));
    }
    if !(u3_origin > T::zero()) {
        return Err(Error::Domain(format!("u3(0) = {u3_origin} must be positive")));
    }
    Ok(c * (t_blowup - t).powf(-alpha) / u3_origin)
}

/// `Σ_{i,j} R_iR_j ∂₃(·)` at the origin, for the full product and its two parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PressureDerivative<T> {
    pub via_full: T,
    pub via_remainder: T,
    pub symmetric_part: T,
}

impl<T: Real> PressureDerivative<T> {
    /// `|viaFull - viaRemainder - symmetricPart|` relative to the largest of the three.
    pub fn identity_defect(&self) -> T {
        let s = self.via_full.abs().max(self.via_remainder.abs()).max(self.symmetric_part.abs());
        let d = (self.via_full - self.via_remainder - self.symmetric_part).abs();
        if s == T::zero() {
            d
        } else {
            d / s
        }
    }
}

/// `Σ_{i,j} R_iR_j ∂₃ g_ij` at the origin node, for symmetric `g_ij` given as
/// the upper triangle `(0,0),(0,1),(0,2),(1,1),(1,2),(2,2)`.
fn origin_value<T: Real>(g: &Grid3<T>, products: &[ScalarField<T>; 6]) -> T {
    const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let spectra: Vec<Spectrum<T>> = products.iter().map(Spectrum::forward).collect();
    let mut acc = T::zero();
    for idx in 0..g.len() {
        let w = g.wave(idx);
        if w.xi_odd_sq == T::zero() {
            continue;
        }
        let mut s = Complex::new(T::zero(), T::zero());
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let weight = if i == j { T::one() } else { T::lit(2.0) };
            let sym = -w.xi_odd[i] * w.xi_odd[j] / w.xi_odd_sq * weight;
            s = s + spectra[p].data()[idx] * sym;
        }
        // ∂₃ then evaluation at node (N/2, N/2, N/2), where e^{iπ(k₁+k₂+k₃)} = ±1
        let s = s * Complex::new(T::zero(), w.xi_odd[2]);
        let [a, b, c] = g.unidx(idx);
        let sign = if (a + b + c) % 2 == 0 { T::one() } else { -T::one() };
        acc = acc + s.re * sign;
    }
    acc / T::from_usize_(g.len())
}

fn products<T: Real>(a: &VectorField3<T>, b: &VectorField3<T>, symmetrized: bool) -> [ScalarField<T>; 6] {
    const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    PAIRS.map(|(i, j)| {
        let ab = a.component(i).mul(b.component(j));
        if symmetrized && i != j {
            ab.add(&a.component(j).mul(b.component(i))).scale(T::lit(0.5))
        } else {
            ab
        }
    })
}

/// `viaFull` from `u = U + r`, `viaRemainder` from `r_iU_j + U_ir_j + r_ir_j`, `symmetricPart` from `U_iU_j`.
pub fn pressure_derivative_origin<T: Real>(dec: &Decomposition<T>) -> PressureDerivative<T> {
    let g = *dec.sym.grid();
    let u = dec.total();
    let (su, sr) = (&dec.sym, &dec.rem);
    let full = products(&u, &u, false);
    let sym = products(su, su, false);
    let ru = products(sr, su, true);
    let rr = products(sr, sr, false);
    let rem: [ScalarField<T>; 6] = std::array::from_fn(|p| ru[p].scale(T::lit(2.0)).add(&rr[p]));
    PressureDerivative { via_full: origin_value(&g, &full), via_remainder: origin_value(&g, &rem), symmetric_part: origin_value(&g, &sym) }
}

/// `max_{i,j} ‖U_iU_j‖_∞ / h`, the scale for the symmetric part.
pub fn pressure_scale<T: Real>(sym: &VectorField3<T>) -> T {
    let mut m = T::zero();
    for i in 0..3 {
        for j in i..3 {
            m = m.max(sym.component(i).mul(sym.component(j)).max_abs());
        }
    }
    m / sym.grid().h()
}

/// The two quantities bounded at a maximum point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaChecks<T> {
    /// `u₃(0) ∂₃p(0)`, with `∂₃p(0)` the full pressure derivative.
    pub v_grad_p: T,
    /// `u₃(0) Δ_h u₃(0)` with the 7-point Laplacian on the source lattice.
    pub v_laplacian_v: T,
    /// `1e-3 h max|v|²`.
    pub slack: T,
    pub holds: bool,
}

/// Evaluates both quantities at the maximum point `m` of `v`.
///
/// The Laplacian is rotation invariant, so `Δu₃(0) = Δ(v·τ)(x_M)`, taken on
/// the lattice of `v` where `x_M` is a node.
pub fn lemma_checks<T: Real>(v: &VectorField3<T>, m: &MaxPoint<T>, frame: &Frame<T>, pressure: &PressureDerivative<T>) -> Result<LemmaChecks<T>> {
    let speed = v.magnitude();
    let max = speed.max_abs();
    let at = speed.data()[m.index];
    if at < (T::one() - T::lit(crate::frame::DEFAULT_TIE_TOL)) * max {
        return Err(Error::Frame(format!("node {} has |v| = {at}, below the maximum {max}", m.index)));
    }
    let tau = frame.tau;
    let w = v.component(0).scale(tau[0]).add(&v.component(1).scale(tau[1])).add(&v.component(2).scale(tau[2]));
    let u3 = w.data()[m.index];
    let lap = fd_laplacian_at(&w, m.index);
    let slack = T::lit(1e-3) * v.grid().h() * max * max;
    let v_laplacian_v = u3 * lap;
    Ok(LemmaChecks { v_grad_p: u3 * pressure.via_full, v_laplacian_v, slack, holds: v_laplacian_v <= slack })
}

/// `‖curl v‖_∞` over nodes, spectral curl.
pub fn bkm_integrand<T: Real>(v: &VectorField3<T>) -> T {
    v.curl(DiffMethod::Spectral).max_norm()
}

fn check_times<T: Real>(times: &[T], values: &[T]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::Series(format!("{} times but {} values", times.len(), values.len())));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Series("time stamps are not strictly increasing".into()));
    }
    Ok(())
}

fn trapezoid<T: Real>(times: &[T], values: &[T]) -> T {
    times
        .windows(2)
        .zip(values.windows(2))
        .fold(T::zero(), |s, (t, v)| s + T::lit(0.5) * (t[1] - t[0]) * (v[0] + v[1]))
}

/// Trapezoidal `∫ ‖curl v‖_∞ dt` from per-snapshot integrands.
pub fn bkm_accumulate<T: Real>(times: &[T], integrands: &[T]) -> Result<T> {
    check_times(times, integrands)?;
    Ok(trapezoid(times, integrands))
}

/// Trapezoidal `∫ ‖v‖_∞² dt` from per-snapshot sup norms.
pub fn l2linf_accumulate<T: Real>(times: &[T], sup_norms: &[T]) -> Result<T> {
    check_times(times, sup_norms)?;
    let sq: Vec<T> = sup_norms.iter().map(|v| *v * *v).collect();
    Ok(trapezoid(times, &sq))
}

/// `sup_{|x| > R} |x| |v(x)|` over nodes.
pub fn decay_check<T: Real>(v: &VectorField3<T>, radius: T) -> Result<T> {
    let g = v.grid();
    if !(radius >= T::zero() && radius < g.l()) {
        return Err(Error::Domain(format!("decay radius {radius} must lie in [0, L)")));
    }
    let speed = v.magnitude();
    let mut best: Option<T> = None;
    for (idx, &s) in speed.data().iter().enumerate() {
        let x = g.point(idx);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r > radius {
            best = Some(best.map_or(r * s, |b: T| b.max(r * s)));
        }
    }
    best.ok_or_else(|| Error::Domain(format!("no nodes beyond radius {radius}")))
}

/// Largest `|σ|` (torus mean) of `r_i∂₃U_j`, `∂₃r_i U_j` and `r_i∂₃r_j`.
pub fn sigma_products<T: Real>(dec: &Decomposition<T>) -> T {
    let mut m = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let (ri, dri) = (dec.rem.component(i), dec.d3_rem.component(i));
            m = m
                .max(ri.mul(dec.d3_sym.component(j)).mean().abs())
                .max(dri.mul(dec.sym.component(j)).mean().abs())
                .max(ri.mul(dec.d3_rem.component(j)).mean().abs());
        }
    }
    m
}

fn default_p() -> f64 {
    4.0
}
fn default_balls() -> String {
    "dyadic:2".into()
}
fn default_c() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.5
}
fn default_tie() -> f64 {
    crate::frame::DEFAULT_TIE_TOL
}

/// Monitor settings. `tBlowup` is required; everything else has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NlcConfig {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub phi: GrowthConfig,
    /// `exhaustive` or `dyadic:<stride>`.
    #[serde(default = "default_balls")]
    pub balls: String,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub t_blowup: f64,
    /// Window radii tried besides the unwindowed projection.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub resample: Resample,
    #[serde(default = "default_tie")]
    pub tie_tol: f64,
    /// Radius for the decay check; half the box when absent.
    #[serde(default)]
    pub decay_radius: Option<f64>,
}

impl NlcConfig {
    pub fn new(t_blowup: f64) -> Self {
        Self {
            p: default_p(),
            phi: GrowthConfig::default(),
            balls: default_balls(),
            c: default_c(),
            alpha: default_alpha(),
            t_blowup,
            radii: Vec::new(),
            resample: Resample::default(),
            tie_tol: default_tie(),
            decay_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha < 2.0) {
            return Err(Error::Config(format!("alpha must be below 2, got {}", self.alpha)));
        }
        if !(self.c > 0.0) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        if !self.t_blowup.is_finite() {
            return Err(Error::Config("T must be finite".into()));
        }
        if !(self.tie_tol >= 0.0 && self.tie_tol < 1.0) {
            return Err(Error::Config(format!("tie tolerance {} outside [0, 1)", self.tie_tol)));
        }
        self.balls.parse::<BallStrategy<f64>>()?;
        GrowthFunction::<f64>::from_config(&self.phi)?;
        Ok(())
    }

    pub fn space(&self, grid: &Grid3<f64>) -> Result<VSpace<f64>> {
        VSpace::new(grid, self.p, GrowthFunction::from_config(&self.phi)?, &self.balls.parse()?)
    }
}
