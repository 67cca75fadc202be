//! Pseudo-spectral incompressible Navier–Stokes on the periodic box.
//!
//! The nonlinearity is `P(u × ω)` in rotational form, dealiased with the 2/3
//! rule; the viscous term is integrated exactly (Lawson RK4) or, for order
//! studies, explicitly inside classical RK4.

mod init;

use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::spectral::{Spectrum, Wave};
use crate::grid::{write_snapshot, Grid3, ScalarField, VectorField3};
use crate::harmonic::MultiplierOp;
use crate::real::Real;

pub use init::InitialData;

/// Time integration of the viscous term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Exact integrating factor `e^{-ν|ξ|²t}`.
    #[default]
    IntegratingFactor,
    /// Viscous term inside the RK4 stages. The state is truncated to the
    /// 2/3 band each step, so stability needs `3ν(πN/3L)²dt ≲ 2.78`.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState<T> {
    pub uhat: [Spectrum<T>; 3],
    pub t: T,
    pub nu: T,
    grid: Grid3<T>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `(I - ξξᵀ/|ξ|²) û` per mode; the zero mode is left alone.
pub fn project_div_free<T: Real>(uhat: &[Spectrum<T>; 3]) -> [Spectrum<T>; 3] {
    let g = *uhat[0].grid();
    let mut out: [Vec<Complex<T>>; 3] = std::array::from_fn(|a| uhat[a].data().to_vec());
    for idx in 0..g.len() {
        let w = g.wave(idx);
        if w.xi_odd_sq == T::zero() {
            continue;
        }
        let mut d = zero();
        for (a, o) in out.iter().enumerate() {
            d = d + o[idx] * w.xi_odd[a];
        }
        let d = d / w.xi_odd_sq;
        for (a, o) in out.iter_mut().enumerate() {
            o[idx] = o[idx] - d * w.xi_odd[a];
        }
    }
    out.map(|v| Spectrum::from_vec(g, v))
}

/// Leray projection of a real field.
pub fn project_field<T: Real>(v: &VectorField3<T>) -> VectorField3<T> {
    let s = project_div_free(&v.components().clone().map(|c| Spectrum::forward(&c)));
    VectorField3::from_components(s.map(|s| s.to_real()))
}

fn dealiased<T: Real>(g: &Grid3<T>, w: &Wave<T>) -> bool {
    let cut = (g.n() / 3) as isize;
    w.m.iter().all(|&m| m.abs() <= cut)
}

impl<T: Real> SpectralState<T> {
    /// Projects `v` onto divergence-free fields.
    pub fn from_velocity(v: &VectorField3<T>, nu: T) -> Self {
        let uhat = project_div_free(&v.components().clone().map(|c| Spectrum::forward(&c)));
        Self { uhat, t: T::zero(), nu, grid: *v.grid() }
    }

    pub fn from_initial(grid: &Grid3<T>, init: &InitialData, nu: T) -> Result<Self> {
        Ok(Self::from_velocity(&init.sample(grid)?, nu))
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.grid
    }

    pub fn velocity(&self) -> VectorField3<T> {
        VectorField3::from_components(std::array::from_fn(|a| self.uhat[a].to_real()))
    }

    /// Largest imaginary residue of the inverse transforms.
    pub fn imaginary_residue(&self) -> T {
        self.uhat.iter().map(|s| s.to_real_checked().1).fold(T::zero(), T::max)
    }

    /// `max_ξ |ξ·û(ξ)| / max_ξ |û(ξ)|`.
    pub fn max_divergence(&self) -> T {
        let g = self.grid;
        let (mut d, mut scale) = (T::zero(), T::zero());
        for idx in 0..g.len() {
            let w = g.wave(idx);
            let mut s = zero();
            for a in 0..3 {
                let c = self.uhat[a].data()[idx];
                s = s + c * w.xi_odd[a];
                scale = scale.max(c.norm());
            }
            d = d.max(s.norm());
        }
        if scale == T::zero() {
            T::zero()
        } else {
            d / scale
        }
    }

    /// Discrete `‖u‖₂` on the box.
    pub fn l2_norm(&self) -> T {
        let mut s = T::zero();
        for u in &self.uhat {
            s = s + u.data().iter().map(|c| c.norm_sqr()).sum::<T>();
        }
        let len = T::from_usize_(self.grid.len());
        (s / len * self.grid.cell_volume()).sqrt()
    }

    pub fn max_speed(&self) -> T {
        self.velocity().max_norm()
    }

    /// `P(u × ω)` with the 2/3-rule mask applied.
    fn nonlinear(&self, uhat: &[Spectrum<T>; 3]) -> [Spectrum<T>; 3] {
        let g = self.grid;
        let u: [ScalarField<T>; 3] = std::array::from_fn(|a| uhat[a].to_real());
        let d = |s: &Spectrum<T>, axis: usize| s.multiply(|w: &Wave<T>| Complex::new(T::zero(), w.xi_odd[axis])).to_real();
        let om = [
            d(&uhat[2], 1).sub(&d(&uhat[1], 2)),
            d(&uhat[0], 2).sub(&d(&uhat[2], 0)),
            d(&uhat[1], 0).sub(&d(&uhat[0], 1)),
        ];
        let cross = [
            u[1].mul(&om[2]).sub(&u[2].mul(&om[1])),
            u[2].mul(&om[0]).sub(&u[0].mul(&om[2])),
            u[0].mul(&om[1]).sub(&u[1].mul(&om[0])),
        ];
        let hat = cross.map(|c| Spectrum::forward(&c).multiply(|w| if dealiased(&g, w) { Complex::new(T::one(), T::zero()) } else { zero() }));
        project_div_free(&hat)
    }

    /// `e^{-ν|ξ|² s}` per mode.
    fn decay(&self, s: T) -> Vec<T> {
        (0..self.grid.len()).map(|idx| (-self.nu * self.grid.wave(idx).xi_sq * s).exp()).collect()
    }

    /// `dt ≤ 0.5 h / max|u|`.
    pub fn cfl_limit(&self) -> T {
        let m = self.max_speed();
        if m == T::zero() {
            T::infinity()
        } else {
            T::lit(0.5) * self.grid.h() / m
        }
    }

    /// One RK4 step.
    pub fn step(&self, dt: T, scheme: Scheme) -> Result<Self> {
        let limit = self.cfl_limit();
        if !(dt > T::zero()) || dt > limit {
            return Err(Error::Cfl { dt: dt.to_f64_(), limit: limit.to_f64_() });
        }
        let half = dt * T::lit(0.5);
        let axpy = |x: &[Spectrum<T>; 3], a: T, y: &[Spectrum<T>; 3]| -> [Spectrum<T>; 3] { std::array::from_fn(|c| x[c].add(&y[c].scale(a))) };
        let next = match scheme {
            Scheme::IntegratingFactor => {
                let eh = self.decay(half);
                let ef = self.decay(dt);
                let damp = |x: &[Spectrum<T>; 3], e: &[T]| -> [Spectrum<T>; 3] {
                    std::array::from_fn(|c| Spectrum::from_vec(self.grid, x[c].data().iter().zip(e).map(|(&v, &f)| v * f).collect()))
                };
                let u = &self.uhat;
                let k1 = self.nonlinear(u);
                let k2 = self.nonlinear(&damp(&axpy(u, half, &k1), &eh));
                let uh = damp(u, &eh);
                let k3 = self.nonlinear(&axpy(&uh, half, &k2));
                let k4 = self.nonlinear(&axpy(&damp(u, &ef), dt, &damp(&k3, &eh)));
                let s = dt / T::lit(6.0);
                let mid: [Spectrum<T>; 3] = std::array::from_fn(|c| k2[c].add(&k3[c]).scale(T::lit(2.0)));
                let mut acc = damp(&axpy(u, s, &k1), &ef);
                acc = axpy(&acc, s, &damp(&mid, &eh));
                axpy(&acc, s, &k4)
            }
            Scheme::Explicit => {
                let rhs = |x: &[Spectrum<T>; 3]| -> [Spectrum<T>; 3] {
                    let n = self.nonlinear(x);
                    std::array::from_fn(|c| n[c].sub(&x[c].multiply(|w| Complex::new(self.nu * w.xi_sq, T::zero()))))
                };
                let u = &self.uhat.clone().map(|s| s.multiply(|w| if dealiased(&self.grid, w) { Complex::new(T::one(), T::zero()) } else { zero() }));
                let k1 = rhs(u);
                let k2 = rhs(&axpy(u, half, &k1));
                let k3 = rhs(&axpy(u, half, &k2));
                let k4 = rhs(&axpy(u, dt, &k3));
                let s = dt / T::lit(6.0);
                let mut acc = axpy(u, s, &k1);
                acc = axpy(&acc, s * T::lit(2.0), &k2);
                acc = axpy(&acc, s * T::lit(2.0), &k3);
                axpy(&acc, s, &k4)
            }
        };
        if next.iter().any(|s| s.data().iter().any(|c| !c.re.is_finite() || !c.im.is_finite())) {
            return Err(Error::NumericalBlowup(format!("non-finite coefficients at t = {}", (self.t + dt).to_f64_())));
        }
        Ok(Self { uhat: next, t: self.t + dt, nu: self.nu, grid: self.grid })
    }

    /// Steps to `t_target`, shortening the last step to land on it.
    pub fn advance_to(&self, t_target: T, dt: T, scheme: Scheme) -> Result<Self> {
        let mut s = self.clone();
        let tiny = T::lit(1e-12) * dt;
        while t_target - s.t > tiny {
            let h = dt.min(t_target - s.t);
            s = s.step(h, scheme)?;
        }
        s.t = t_target;
        Ok(s)
    }
}

/// `p = Σ R_iR_j(u_iu_j)` with zero mean.
pub fn pressure_from_velocity<T: Real>(state: &SpectralState<T>) -> ScalarField<T> {
    let u = state.velocity();
    let g = *state.grid();
    let mut acc = Spectrum::zeros(g);
    for i in 0..3 {
        for j in i..3 {
            let w = if i == j { T::one() } else { T::lit(2.0) };
            let s = Spectrum::forward(&u.component(i).mul(u.component(j)));
            acc = acc.add(&MultiplierOp::riesz_pair(i, j).apply_spectrum(&s).scale(w));
        }
    }
    acc.to_real()
}

/// Settings for [`run`]. `nu` defaults to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub l: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Snapshot spacing; `None` keeps only the initial and final states.
    #[serde(default)]
    pub snapshot_every: Option<f64>,
    #[serde(default = "unit")]
    pub nu: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

fn unit() -> f64 {
    1.0
}

impl SolverConfig {
    pub fn new(n: usize, l: f64, dt: f64, t_end: f64) -> Self {
        Self { n, l, dt, t_end, snapshot_every: None, nu: 1.0, scheme: Scheme::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config("dt must be positive".into()));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config("end time must be non-negative".into()));
        }
        if let Some(e) = self.snapshot_every {
            if !(e > 0.0) {
                return Err(Error::Config("snapshot spacing must be positive".into()));
            }
        }
        if !(self.nu > 0.0) {
            return Err(Error::Config("viscosity must be positive".into()));
        }
        Grid3::<f64>::new(self.n, self.l).map(|_| ())
    }

    /// Snapshot times: `0, e, 2e, …` below `t_end`, then `t_end`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let mut times = vec![0.0];
        if let Some(e) = self.snapshot_every.filter(|e| e.is_finite()) {
            let mut k = 1u64;
            loop {
                let t = k as f64 * e;
                if t >= self.t_end * (1.0 - 1e-12) {
                    break;
                }
                times.push(t);
                k += 1;
            }
        }
        if self.t_end > 0.0 {
            times.push(self.t_end);
        }
        times
    }
}

/// Files written by [`run`], and the error that stopped it early, if any.
#[derive(Debug)]
pub struct RunSummary {
    pub paths: Vec<PathBuf>,
    pub times: Vec<f64>,
    /// True when `‖u‖₂` never increased between snapshots.
    pub energy_monotone: bool,
    pub failure: Option<Error>,
}

impl RunSummary {
    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Integrates `init` and writes `snap_NNNNN.nscv` files into `out`.
pub fn run(init: &InitialData, cfg: &SolverConfig, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let grid = Grid3::new(cfg.n, cfg.l)?;
    std::fs::create_dir_all(out)?;
    let mut state = SpectralState::from_initial(&grid, init, cfg.nu)?;
    let mut summary = RunSummary { paths: Vec::new(), times: Vec::new(), energy_monotone: true, failure: None };
    let mut energy = state.l2_norm();
    for (k, &t) in cfg.snapshot_times().iter().enumerate() {
        if t > state.t {
            match state.advance_to(t, cfg.dt, cfg.scheme) {
                Ok(s) => state = s,
                Err(e) => {
                    summary.failure = Some(e);
                    break;
                }
            }
        }
        let e = state.l2_norm();
        if e > energy * (1.0 + 1e-12) {
            summary.energy_monotone = false;
        }
        energy = e;
        let path = out.join(format!("snap_{k:05}.nscv"));
        write_snapshot(&path, &state.velocity(), state.t, state.nu)?;
        summary.paths.push(path);
        summary.times.push(state.t);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{read_snapshot, DiffMethod};
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid3<f64> {
        Grid3::new(n, PI).unwrap()
    }

    fn rel_err(a: &VectorField3<f64>, b: &VectorField3<f64>) -> f64 {
        a.sub(b).max_abs() / b.max_abs()
    }

    #[test]
    fn projection() {
        let g = grid(16);
        let grad = VectorField3::from_fn(g, |p| [p[1].cos() * p[0].cos(), -p[0].sin() * p[1].sin(), 2.0 * (2.0 * p[2]).cos()]);
        assert!(project_field(&grad).max_abs() <= 1e-13);
        let abc = InitialData::beltrami().sample(&g).unwrap();
        assert!(project_field(&abc).sub(&abc).max_abs() <= 1e-13);
        let raw = VectorField3::from_fn(g, |p| [(p[0] + 2.0 * p[1]).sin(), p[2].cos() * p[0].sin(), (p[1] - p[2]).cos()]);
        let s = SpectralState::from_velocity(&raw, 1.0);
        assert!(s.max_divergence() <= 1e-12);
        assert!(s.velocity().divergence(DiffMethod::Spectral).max_abs() <= 1e-12);
    }

    #[test]
    fn zero_field_stays_zero() {
        let s = SpectralState::from_velocity(&VectorField3::zeros(grid(8)), 1.0);
        let t = s.step(0.1, Scheme::IntegratingFactor).unwrap();
        assert_eq!(t.velocity().max_abs(), 0.0);
        assert_eq!(t.t, 0.1);
    }

    #[test]
    fn cfl_and_blowup() {
        let s = SpectralState::from_initial(&grid(16), &InitialData::beltrami(), 1.0).unwrap();
        assert!(matches!(s.step(1.0, Scheme::IntegratingFactor), Err(Error::Cfl { .. })));
        let mut bad = s.clone();
        bad.uhat[0].data_mut()[5] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(bad.step(1e-3, Scheme::Explicit), Err(Error::NumericalBlowup(_)) | Err(Error::Cfl { .. })));
    }

    #[test]
    fn beltrami_decays_exactly() {
        let g = grid(16);
        let s0 = SpectralState::from_initial(&g, &InitialData::beltrami(), 1.0).unwrap();
        let u0 = s0.velocity();
        let s = s0.advance_to(0.1, 1e-2, Scheme::IntegratingFactor).unwrap();
        assert!(rel_err(&s.velocity(), &u0.scale((-0.1f64).exp())) <= 1e-12);
        assert!(s.max_divergence() <= 1e-12);
        assert!(s.imaginary_residue() <= 1e-12);
    }

    #[test]
    fn explicit_scheme_is_fourth_order() {
        let g = grid(16);
        let s0 = SpectralState::from_initial(&g, &InitialData::beltrami(), 1.0).unwrap();
        let exact = s0.velocity().scale((-1.0f64).exp());
        let err = |dt: f64| rel_err(&s0.advance_to(1.0, dt, Scheme::Explicit).unwrap().velocity(), &exact);
        let ratio = err(1.0 / 40.0) / err(1.0 / 80.0);
        assert!((14.0..=18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn taylor_green_dissipates() {
        let g = grid(16);
        let mut s = SpectralState::from_initial(&g, &InitialData::TaylorGreen, 0.1).unwrap();
        let mut e = s.l2_norm();
        for _ in 0..20 {
            s = s.step(0.02, Scheme::IntegratingFactor).unwrap();
            assert!(s.l2_norm() <= e);
            e = s.l2_norm();
            assert!(s.max_divergence() <= 1e-12);
        }
    }

    #[test]
    fn pressure_paths_agree() {
        let g = grid(16);
        let s = SpectralState::from_initial(&g, &InitialData::RandomBandLimited { seed: 3, kmax: 3 }, 1.0).unwrap();
        let p = pressure_from_velocity(&s);
        assert!(p.mean().abs() <= 1e-14);
        // ∇p equals minus the gradient part of (u·∇)u
        let u = s.velocity();
        let adv: [ScalarField<f64>; 3] = std::array::from_fn(|i| {
            let mut a = ScalarField::zeros(g);
            for j in 0..3 {
                a = a.add(&u.component(j).mul(&u.component(i).derivative(j, DiffMethod::Spectral)));
            }
            a
        });
        let adv = VectorField3::from_components(adv);
        let grad_part = adv.sub(&project_field(&adv));
        let grad_p = p.gradient(DiffMethod::Spectral);
        assert!(grad_p.add(&grad_part).max_abs() <= 1e-11 * grad_part.max_abs());
        let c = SpectralState::from_velocity(&VectorField3::from_fn(g, |_| [1.0, -2.0, 0.5]), 1.0);
        assert!(pressure_from_velocity(&c).max_abs() <= 1e-14);
    }

    #[test]
    fn gaussian_vortex_is_schwartz_like() {
        let g = Grid3::<f64>::new(32, 8.0).unwrap();
        let init = InitialData::GaussianVortex { width: 0.0 }.for_box(8.0);
        let v = init.sample(&g).unwrap();
        assert!((v.max_norm() - 1.0).abs() <= 0.05);
        let mut edge: f64 = 0.0;
        for idx in 0..g.len() {
            if g.unidx(idx).contains(&0) {
                edge = edge.max(v.at(idx).iter().map(|x| x.abs()).fold(0.0, f64::max));
            }
        }
        assert!(edge <= 1e-12, "{edge}");
        let d = project_field(&v).sub(&v).max_abs();
        assert!(d <= 1e-8, "{d}");
    }

    #[test]
    fn run_writes_monotone_series() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = SolverConfig::new(8, PI, 0.01, 0.05);
        let s = run(&InitialData::beltrami(), &cfg, dir.path()).unwrap();
        assert_eq!(s.times, vec![0.0, 0.05]);
        cfg.snapshot_every = Some(1.0 / 45.0);
        let s = run(&InitialData::beltrami(), &cfg, dir.path()).unwrap();
        assert_eq!(s.times.len(), 4);
        assert!(s.complete() && s.energy_monotone);
        let first = read_snapshot(&s.paths[0]).unwrap();
        let last = read_snapshot(&s.paths[3]).unwrap();
        assert_eq!(last.time, 0.05);
        assert!(rel_err(&last.field, &first.field.scale((-0.05f64).exp())) <= 1e-12);
        let again = tempfile::tempdir().unwrap();
        let s2 = run(&InitialData::beltrami(), &cfg, again.path()).unwrap();
        for (a, b) in s.paths.iter().zip(&s2.paths) {
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
        cfg.dt = 10.0;
        cfg.t_end = 5.0;
        cfg.snapshot_every = None;
        let s = run(&InitialData::beltrami(), &cfg, dir.path()).unwrap();
        assert!(matches!(s.failure, Some(Error::Cfl { .. })));
        assert_eq!(s.paths.len(), 1);
    }
}
