//! Variable growth functions `φ(x, r)` and the integrals built from them.
//!
//! Every kind except [`GrowthKind::Custom`] is a piecewise power law in `r`
//! for fixed `x`, so all Dini-type integrals and the `Φ*`/`Φ**` integrals are
//! evaluated in closed form. Custom evaluators fall back to adaptive
//! Gauss–Kronrod quadrature with relative tolerance `1e-10`.

mod conditions;
pub mod quad;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub use conditions::{
    check_almost_increasing, check_conditions, check_doubling, check_nearness, compare_growth, ConditionFragment,
    ConditionReport, SampleSpec,
};

/// Relative tolerance used for Custom-kind quadrature.
pub const CUSTOM_QUAD_TOL: f64 = 1e-10;

/// Radius at which the piecewise kinds switch branch, both in `|x|` and in `r`.
const BRANCH: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthKind {
    PiecewisePowerPhi,
    PiecewisePowerPsi,
    ConstantOne,
    PowerAlpha,
    MorreyCritical,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthParams<T> {
    pub n: usize,
    pub p: T,
    pub alpha: T,
    pub alpha_tilde: T,
    pub beta: T,
    pub delta: T,
}

impl<T: Real> GrowthParams<T> {
    /// `n = 3, p = 4, α = 1/2, α̃ = β = -3/4`, `δ = 2α̃`.
    pub fn defaults() -> Self {
        Self {
            n: 3,
            p: T::lit(4.0),
            alpha: T::lit(0.5),
            alpha_tilde: T::lit(-0.75),
            beta: T::lit(-0.75),
            delta: T::lit(-1.5),
        }
    }
}

type CustomEval<T> = Arc<dyn Fn(&[T], T) -> T + Send + Sync>;

/// A growth function `φ : ℝⁿ × (0, ∞) → (0, ∞)`.
#[derive(Clone)]
pub struct GrowthFunction<T: Real> {
    kind: GrowthKind,
    params: GrowthParams<T>,
    custom: Option<CustomEval<T>>,
    label: String,
}

impl<T: Real> fmt::Debug for GrowthFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFunction")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("label", &self.label)
            .finish()
    }
}

/// One branch `coef · t^exp` valid for `lo < t ≤ hi`.
#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    lo: T,
    hi: T,
    coef: T,
    exp: T,
}

fn unit_ball_volume<T: Real>(n: usize) -> T {
    // ω_n = 2π/n · ω_{n-2}
    let two_pi = T::lit(2.0) * T::PI();
    let mut w = if n % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        w = w * two_pi / T::from_usize_(k);
        k += 2;
    }
    w
}

fn euclid<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// `∫_a^b coef · t^(e-1) dt` with `a` possibly 0 and `b` possibly ∞.
fn power_integral<T: Real>(coef: T, e: T, a: T, b: T) -> Result<T> {
    if !(b > a) {
        return Ok(T::zero());
    }
    if a == T::zero() && !(e > T::zero()) {
        return Err(Error::Divergence(format!("∫_0 t^({e}-1) dt diverges")));
    }
    if b.is_infinite() && !(e < T::zero()) {
        return Err(Error::Divergence(format!("∫^∞ t^({e}-1) dt diverges")));
    }
    if e == T::zero() {
        return Ok(coef * (b / a).ln());
    }
    let upper = if b.is_infinite() { T::zero() } else { b.powf(e) };
    let lower = if a == T::zero() { T::zero() } else { a.powf(e) };
    Ok(coef * (upper - lower) / e)
}

impl<T: Real> GrowthFunction<T> {
    fn with(kind: GrowthKind, params: GrowthParams<T>, label: impl Into<String>) -> Self {
        Self { kind, params, custom: None, label: label.into() }
    }

    pub fn constant_one(n: usize) -> Self {
        let mut params = GrowthParams::defaults();
        params.n = n;
        Self::with(GrowthKind::ConstantOne, params, "1")
    }

    /// `φ(x, r) = r^α`.
    pub fn power_alpha(n: usize, alpha: T) -> Self {
        let mut params = GrowthParams::defaults();
        params.n = n;
        params.alpha = alpha;
        Self::with(GrowthKind::PowerAlpha, params, format!("r^{alpha}"))
    }

    /// `φ(B) = |B|^{-1/p}`, for which the Morrey norm is the `L^p` norm.
    pub fn morrey_critical(n: usize, p: T) -> Result<Self> {
        if !(p >= T::one()) {
            return Err(Error::Config(format!("MorreyCritical needs p >= 1, got {p}")));
        }
        let mut params = GrowthParams::defaults();
        params.n = n;
        params.p = p;
        Ok(Self::with(GrowthKind::MorreyCritical, params, format!("|B|^(-1/{p})")))
    }

    pub fn custom<F>(n: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[T], T) -> T + Send + Sync + 'static,
    {
        let mut params = GrowthParams::defaults();
        params.n = n;
        Self { kind: GrowthKind::Custom, params, custom: Some(Arc::new(f)), label: label.into() }
    }

    /// The piecewise power `φ` with `r^α`, `r^β`, `r^α̃`, `r^β` branches.
    pub fn make_phi(n: usize, p: T, alpha: T, alpha_tilde: T, beta: T) -> Result<Self> {
        Self::make_phi_with(n, p, alpha, alpha_tilde, beta, false)
    }

    /// Like [`make_phi`](Self::make_phi); `moreover` additionally admits the
    /// borderline case `β = 2α̃ = -2n/p`, which the plain range check rejects.
    pub fn make_phi_with(n: usize, p: T, alpha: T, alpha_tilde: T, beta: T, moreover: bool) -> Result<Self> {
        validate_piecewise(n, p, alpha, alpha_tilde, beta, moreover)?;
        let params = GrowthParams { n, p, alpha, alpha_tilde, beta, delta: alpha_tilde + alpha_tilde };
        Ok(Self::with(GrowthKind::PiecewisePowerPhi, params, "phi"))
    }

    /// `ψ`: identical to `φ` except on `|x| > 2, r ≤ 2`, where the exponent is `2α̃`.
    pub fn make_psi(n: usize, p: T, alpha: T, alpha_tilde: T, beta: T) -> Result<Self> {
        Self::make_psi_with(n, p, alpha, alpha_tilde, beta, false)
    }

    pub fn make_psi_with(n: usize, p: T, alpha: T, alpha_tilde: T, beta: T, moreover: bool) -> Result<Self> {
        validate_piecewise(n, p, alpha, alpha_tilde, beta, moreover)?;
        let params = GrowthParams { n, p, alpha, alpha_tilde, beta, delta: alpha_tilde + alpha_tilde };
        Ok(Self::with(GrowthKind::PiecewisePowerPsi, params, "psi"))
    }

    /// ψ-type function with an explicit far-field small-radius exponent `δ ∈ [-n/q, 0)`.
    pub fn make_psi_delta(n: usize, q: T, alpha: T, delta: T, beta: T) -> Result<Self> {
        let bound = -T::from_usize_(n) / q;
        if !(q > T::one()) {
            return Err(Error::Config(format!("q > 1 violated (q = {q})")));
        }
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::Config(format!("0 < alpha < 1 violated (alpha = {alpha})")));
        }
        if !(delta >= bound && delta < T::zero()) {
            return Err(Error::Config(format!("-n/q <= delta < 0 violated (delta = {delta})")));
        }
        if !(beta >= bound && beta < T::zero()) {
            return Err(Error::Config(format!("-n/q <= beta < 0 violated (beta = {beta})")));
        }
        let params = GrowthParams { n, p: q, alpha, alpha_tilde: delta / T::lit(2.0), beta, delta };
        Ok(Self::with(GrowthKind::PiecewisePowerPsi, params, "psi"))
    }

    /// `φ` with the defaults `n = 3, p = 4, α = 1/2, α̃ = β = -3/4`.
    pub fn default_phi() -> Self {
        let d = GrowthParams::<T>::defaults();
        Self::make_phi(d.n, d.p, d.alpha, d.alpha_tilde, d.beta).expect("defaults are admissible")
    }

    pub fn default_psi() -> Self {
        let d = GrowthParams::<T>::defaults();
        Self::make_psi(d.n, d.p, d.alpha, d.alpha_tilde, d.beta).expect("defaults are admissible")
    }

    pub fn kind(&self) -> GrowthKind {
        self.kind
    }

    pub fn params(&self) -> &GrowthParams<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn segments(&self, x: &[T]) -> Option<[Option<Segment<T>>; 2]> {
        let two = T::lit(BRANCH);
        let inf = T::infinity();
        let pr = &self.params;
        let split = |small: T, large: T| {
            Some([
                Some(Segment { lo: T::zero(), hi: two, coef: T::one(), exp: small }),
                Some(Segment { lo: two, hi: inf, coef: T::one(), exp: large }),
            ])
        };
        let single = |coef: T, exp: T| Some([Some(Segment { lo: T::zero(), hi: inf, coef, exp }), None]);
        match self.kind {
            GrowthKind::PiecewisePowerPhi => {
                if euclid(x) <= two {
                    split(pr.alpha, pr.beta)
                } else {
                    split(pr.alpha_tilde, pr.beta)
                }
            }
            GrowthKind::PiecewisePowerPsi => {
                if euclid(x) <= two {
                    split(pr.alpha, pr.beta)
                } else {
                    split(pr.delta, pr.beta)
                }
            }
            GrowthKind::ConstantOne => single(T::one(), T::zero()),
            GrowthKind::PowerAlpha => single(T::one(), pr.alpha),
            GrowthKind::MorreyCritical => {
                let n = T::from_usize_(pr.n);
                single(unit_ball_volume::<T>(pr.n).powf(-T::one() / pr.p), -n / pr.p)
            }
            GrowthKind::Custom => None,
        }
    }

    fn eval_unchecked(&self, x: &[T], r: T) -> T {
        match self.segments(x) {
            Some(segs) => {
                for s in segs.iter().flatten() {
                    if r <= s.hi {
                        return if s.coef == T::one() { r.powf(s.exp) } else { s.coef * r.powf(s.exp) };
                    }
                }
                unreachable!("last segment is unbounded")
            }
            None => (self.custom.as_ref().expect("custom evaluator present"))(x, r),
        }
    }

    /// Evaluates `φ(x, r)`.
    pub fn eval(&self, x: &[T], r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        Ok(self.eval_unchecked(x, r))
    }

    /// `∫_a^b φ(x, t) t^{-1-κ} dt` for `0 ≤ a < b ≤ ∞`.
    fn weighted_integral(&self, x: &[T], a: T, b: T, kappa: T) -> Result<T> {
        if !(b > a) {
            return Ok(T::zero());
        }
        if let Some(segs) = self.segments(x) {
            let mut total = T::zero();
            for s in segs.iter().flatten() {
                let lo = if s.lo > a { s.lo } else { a };
                let hi = if s.hi < b { s.hi } else { b };
                if hi > lo {
                    total = total + power_integral(s.coef, s.exp - kappa, lo, hi)?;
                }
            }
            return Ok(total);
        }
        self.custom_integral(x, a, b, kappa)
    }

    fn custom_integral(&self, x: &[T], a: T, b: T, kappa: T) -> Result<T> {
        let tol = T::lit(CUSTOM_QUAD_TOL);
        // the log-substituted tail runs past the representable radii; that part contributes nothing
        let f = |t: T| {
            if t > T::zero() && t.is_finite() {
                self.eval_unchecked(x, t)
            } else {
                T::zero()
            }
        };
        if a == T::zero() && b.is_infinite() {
            let one = T::one();
            return Ok(self.custom_integral(x, T::zero(), one, kappa)? + self.custom_integral(x, one, b, kappa)?);
        }
        if a == T::zero() {
            // t = b e^{-s}
            let g = |s: T| {
                let t = b * (-s).exp();
                f(t) * t.powf(-kappa)
            };
            check_tail(&g, "lower Dini integral")?;
            return quad::integrate_half_line(g, tol);
        }
        if b.is_infinite() {
            // t = a e^{s}
            let g = |s: T| {
                let t = a * s.exp();
                f(t) * t.powf(-kappa)
            };
            check_tail(&g, "upper Dini integral")?;
            return quad::integrate_half_line(g, tol);
        }
        quad::integrate(
            |s: T| {
                let t = s.exp();
                f(t) * t.powf(-kappa)
            },
            a.ln(),
            b.ln(),
            tol,
        )
    }

    /// `∫_0^r φ(x, t)/t dt`.
    pub fn dini_lower(&self, x: &[T], r: T) -> Result<T> {
        check_radius(r)?;
        self.weighted_integral(x, T::zero(), r, T::zero())
    }

    /// `∫_r^∞ φ(x, t)/t dt`.
    pub fn dini_upper(&self, x: &[T], r: T) -> Result<T> {
        check_radius(r)?;
        self.weighted_integral(x, r, T::infinity(), T::zero())
    }

    /// `r^κ ∫_r^∞ φ(x, t)/t^{1+κ} dt`, the smoothness-weighted tail.
    pub fn dini_upper_weighted(&self, x: &[T], r: T, kappa: T) -> Result<T> {
        check_radius(r)?;
        Ok(r.powf(kappa) * self.weighted_integral(x, r, T::infinity(), kappa)?)
    }

    fn star_upper(x: &[T], r: T) -> T {
        let two = T::lit(BRANCH);
        let nx = euclid(x);
        let m = if nx > two { nx } else { two };
        if r > m {
            r
        } else {
            m
        }
    }

    /// `Φ*(x, r) = ∫_1^{max(2,|x|,r)} φ(0, t)/t dt`.
    pub fn phi_star(&self, x: &[T], r: T) -> Result<T> {
        check_radius(r)?;
        let origin = vec![T::zero(); x.len()];
        self.weighted_integral(&origin, T::one(), Self::star_upper(x, r), T::zero())
    }

    /// `Φ**(x, r) = ∫_r^{max(2,|x|,r)} φ(x, t)/t dt`.
    pub fn phi_star_star(&self, x: &[T], r: T) -> Result<T> {
        check_radius(r)?;
        self.weighted_integral(x, r, Self::star_upper(x, r), T::zero())
    }

    /// The product `φ · (Φ* + Φ**)`.
    pub fn psi_from_phi(&self) -> Result<Self> {
        if self.kind != GrowthKind::PiecewisePowerPhi {
            return Err(Error::Config(format!("psi_from_phi expects PiecewisePowerPhi, got {:?}", self.kind)));
        }
        let base = self.clone();
        let mut out = Self::custom(self.params.n, "phi*(Phi*+Phi**)", move |x: &[T], r: T| {
            let s = base.phi_star(x, r).unwrap_or(T::nan()) + base.phi_star_star(x, r).unwrap_or(T::nan());
            base.eval_unchecked(x, r) * s
        });
        out.params = self.params;
        Ok(out)
    }

    pub fn to_config(&self) -> Result<GrowthConfig> {
        if self.kind == GrowthKind::Custom {
            return Err(Error::Config("custom growth functions cannot be serialized".into()));
        }
        let p = &self.params;
        Ok(GrowthConfig {
            kind: self.kind,
            n: p.n,
            p: p.p.to_f64_(),
            alpha: p.alpha.to_f64_(),
            alpha_tilde: p.alpha_tilde.to_f64_(),
            beta: p.beta.to_f64_(),
            delta: Some(p.delta.to_f64_()),
            moreover: false,
        })
    }

    pub fn from_config(c: &GrowthConfig) -> Result<Self> {
        let t = T::lit;
        match c.kind {
            GrowthKind::PiecewisePowerPhi => {
                Self::make_phi_with(c.n, t(c.p), t(c.alpha), t(c.alpha_tilde), t(c.beta), c.moreover)
            }
            GrowthKind::PiecewisePowerPsi => {
                let mut g = Self::make_psi_with(c.n, t(c.p), t(c.alpha), t(c.alpha_tilde), t(c.beta), c.moreover)?;
                if let Some(d) = c.delta {
                    if !(d < 0.0 && d >= -2.0 * c.n as f64 / c.p) {
                        return Err(Error::Config(format!("delta out of range: {d}")));
                    }
                    g.params.delta = t(d);
                }
                Ok(g)
            }
            GrowthKind::ConstantOne => Ok(Self::constant_one(c.n)),
            GrowthKind::PowerAlpha => Ok(Self::power_alpha(c.n, t(c.alpha))),
            GrowthKind::MorreyCritical => Self::morrey_critical(c.n, t(c.p)),
            GrowthKind::Custom => Err(Error::Config("custom growth functions cannot be deserialized".into())),
        }
    }
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {r}")))
    }
}

/// Rejects integrands on `[0, ∞)` whose log-scale tail does not decay.
fn check_tail<T: Real, G: Fn(T) -> T>(g: &G, what: &str) -> Result<()> {
    let (a, b) = (g(T::lit(30.0)), g(T::lit(60.0)));
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Divergence(format!("{what}: integrand not finite in the tail")));
    }
    if a.abs() == T::zero() {
        return Ok(());
    }
    let rate = (a.abs() / b.abs()).ln() / T::lit(30.0);
    if rate.is_nan() || rate < T::lit(1e-3) {
        return Err(Error::Divergence(format!("{what}: integrand tail does not decay")));
    }
    Ok(())
}

fn validate_piecewise<T: Real>(n: usize, p: T, alpha: T, alpha_tilde: T, beta: T, moreover: bool) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("dimension n must be positive".into()));
    }
    if !(p > T::lit(2.0)) {
        return Err(Error::Config(format!("p > 2 violated (p = {p})")));
    }
    let bound = -T::from_usize_(n) / p;
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Config(format!("0 < alpha < 1 violated (alpha = {alpha})")));
    }
    if !(alpha_tilde >= bound && alpha_tilde < T::zero()) {
        return Err(Error::Config(format!("-n/p <= alphaTilde < 0 violated (alphaTilde = {alpha_tilde})")));
    }
    let borderline = {
        let tol = T::lit(1e-12);
        (beta - (alpha_tilde + alpha_tilde)).abs() <= tol && (beta - (bound + bound)).abs() <= tol
    };
    if moreover && borderline {
        return Ok(());
    }
    if !(beta >= bound && beta < T::zero()) {
        return Err(Error::Config(format!("-n/p <= beta < 0 violated (beta = {beta})")));
    }
    Ok(())
}

/// Structured text form of a growth function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthConfig {
    pub kind: GrowthKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_tilde")]
    pub alpha_tilde: f64,
    #[serde(default = "default_tilde")]
    pub beta: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub moreover: bool,
}

fn default_n() -> usize {
    3
}
fn default_p() -> f64 {
    4.0
}
fn default_alpha() -> f64 {
    0.5
}
fn default_tilde() -> f64 {
    -0.75
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            kind: GrowthKind::PiecewisePowerPhi,
            n: 3,
            p: 4.0,
            alpha: 0.5,
            alpha_tilde: -0.75,
            beta: -0.75,
            delta: None,
            moreover: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> GrowthFunction<f64> {
        GrowthFunction::make_phi(3, 4.0, 0.5, -0.75, -0.75).unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = phi();
        assert_eq!(g.eval(&[0.0, 0.0, 0.0], 1.0).unwrap(), 1.0);
        assert!((g.eval(&[0.0; 3], 4.0).unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!((g.eval(&[3.0, 0.0, 0.0], 0.25).unwrap() - 2.828_427_124_746_19).abs() < 1e-13);
        assert!(matches!(g.eval(&[0.0; 3], 0.0), Err(Error::Domain(_))));
        assert!(matches!(g.eval(&[0.0; 3], -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn constructors() {
        assert_eq!(phi().eval(&[3.0, 0.0, 0.0], 1.0).unwrap(), 1.0);
        let psi = GrowthFunction::<f64>::make_psi(3, 4.0, 0.5, -0.75, -0.75).unwrap();
        assert!((psi.eval(&[3.0, 0.0, 0.0], 0.5).unwrap() - 2.828_427_124_746_19).abs() < 1e-13);
        // psi agrees with phi away from the |x| > 2, r <= 2 branch
        for (x, r) in [([0.0, 0.0, 0.0], 0.5), ([0.0, 1.0, 0.0], 3.0), ([5.0, 0.0, 0.0], 7.0)] {
            assert_eq!(psi.eval(&x, r).unwrap(), phi().eval(&x, r).unwrap());
        }
        let err = GrowthFunction::<f64>::make_phi(3, 4.0, 0.5, -0.75, -2.0).unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
        assert!(GrowthFunction::<f64>::make_phi(3, 2.0, 0.5, -0.75, -0.75).is_err());
        assert!(GrowthFunction::<f64>::make_phi(3, 4.0, 1.0, -0.75, -0.75).is_err());
        assert!(GrowthFunction::<f64>::make_phi(3, 4.0, 0.5, 0.0, -0.75).is_err());
    }

    #[test]
    fn moreover_variant_needs_flag() {
        // alphaTilde = beta/2 = -n/p
        assert!(GrowthFunction::<f64>::make_phi(3, 4.0, 0.5, -0.75, -1.5).is_err());
        let g = GrowthFunction::<f64>::make_phi_with(3, 4.0, 0.5, -0.75, -1.5, true).unwrap();
        assert_eq!(g.params().beta, -1.5);
        // the flag does not open up arbitrary betas
        assert!(GrowthFunction::<f64>::make_phi_with(3, 4.0, 0.5, -0.75, -1.2, true).is_err());
    }

    #[test]
    fn dini_examples() {
        let pa = GrowthFunction::<f64>::power_alpha(3, 0.5);
        assert!((pa.dini_lower(&[0.0; 3], 1.0).unwrap() - 2.0).abs() < 1e-15);
        let up = phi().dini_upper(&[0.0; 3], 2.0).unwrap();
        assert!((up - 4.0 / 3.0 * 2f64.powf(-0.75)).abs() < 1e-14);
        assert!(matches!(GrowthFunction::<f64>::constant_one(3).dini_lower(&[0.0; 3], 1.0), Err(Error::Divergence(_))));
        assert!(matches!(pa.dini_upper(&[0.0; 3], 1.0), Err(Error::Divergence(_))));
        // far-field branch of phi has a negative small-radius exponent
        assert!(matches!(phi().dini_lower(&[3.0, 0.0, 0.0], 1.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn phi_star_examples() {
        let g = phi();
        let c = 2.0 * (2f64.sqrt() - 1.0);
        assert!((g.phi_star(&[0.0; 3], 1.0).unwrap() - c).abs() < 1e-15);
        assert_eq!(g.phi_star_star(&[0.0; 3], 2.0).unwrap(), 0.0);
        assert!((g.phi_star_star(&[0.0; 3], 1.0).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn custom_matches_closed_form() {
        let base = phi();
        let b2 = base.clone();
        let custom = GrowthFunction::custom(3, "phi-copy", move |x: &[f64], r| b2.eval(x, r).unwrap());
        for (x, r) in [([0.0, 0.0, 0.0], 0.7), ([0.5, 0.5, 0.0], 3.0), ([3.0, 1.0, 0.0], 1.5)] {
            let a = base.dini_upper(&x, r).unwrap();
            let b = custom.dini_upper(&x, r).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs(), "{a} vs {b}");
            let a = base.phi_star_star(&x, r).unwrap();
            let b = custom.phi_star_star(&x, r).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300), "{a} vs {b}");
        }
        let a = base.dini_lower(&[0.0; 3], 1.5).unwrap();
        let b = custom.dini_lower(&[0.0; 3], 1.5).unwrap();
        assert!((a - b).abs() <= 1e-9 * a);
        let one = GrowthFunction::custom(3, "one", |_: &[f64], _| 1.0);
        assert!(matches!(one.dini_upper(&[0.0; 3], 1.0), Err(Error::Divergence(_))));
        assert!(matches!(one.dini_lower(&[0.0; 3], 1.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn morrey_critical_is_inverse_volume_root() {
        let g = GrowthFunction::morrey_critical(3, 2.0).unwrap();
        let r: f64 = 0.7;
        let vol = 4.0 / 3.0 * std::f64::consts::PI * r.powi(3);
        assert!((g.eval(&[1.0, 2.0, 3.0], r).unwrap() - vol.powf(-0.5)).abs() < 1e-14);
    }

    #[test]
    fn config_round_trip() {
        let g = GrowthFunction::<f64>::default_psi();
        let text = serde_json::to_string(&g.to_config().unwrap()).unwrap();
        let c: GrowthConfig = serde_json::from_str(&text).unwrap();
        let h = GrowthFunction::<f64>::from_config(&c).unwrap();
        for (x, r) in [([3.0, 0.0, 0.0], 0.5), ([0.0; 3], 0.5), ([0.0; 3], 5.0)] {
            assert_eq!(g.eval(&x, r).unwrap(), h.eval(&x, r).unwrap());
        }
        let c: GrowthConfig = serde_json::from_str(r#"{"kind":"PowerAlpha","alpha":0.25}"#).unwrap();
        let h = GrowthFunction::<f64>::from_config(&c).unwrap();
        assert_eq!(h.eval(&[0.0; 3], 16.0).unwrap(), 2.0);
        let bad: GrowthConfig = serde_json::from_str(r#"{"kind":"PiecewisePowerPhi","beta":-2.0}"#).unwrap();
        assert!(GrowthFunction::<f64>::from_config(&bad).is_err());
    }

    #[test]
    fn f32_evaluation() {
        let g = GrowthFunction::<f32>::default_phi();
        assert!((g.eval(&[0.0; 3], 4.0).unwrap() - 0.353_553_4).abs() < 1e-6);
    }
}
