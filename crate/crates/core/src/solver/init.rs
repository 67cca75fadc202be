use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::spectral::Spectrum;
use crate::grid::{Grid3, ScalarField, VectorField3};
use crate::real::Real;

/// Initial velocity fields. All are Leray-projected before use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum InitialData {
    /// ABC flow at the fundamental wavenumber `k₀ = π/L`; `curl u = k₀ u`.
    Beltrami { a: f64, b: f64, c: f64 },
    TaylorGreen,
    /// Random coefficients on `|m|_∞ ≤ kmax`, scaled to `max|u| = 1`.
    RandomBandLimited { seed: u64, kmax: usize },
    /// `u = (-y, x, 0) e^{-|x|²/2w²}` scaled to `max|u| = 1`.
    GaussianVortex { width: f64 },
}

impl InitialData {
    pub fn beltrami() -> Self {
        InitialData::Beltrami { a: 1.0, b: 1.0, c: 1.0 }
    }

    /// Sets a Gaussian vortex width to `L/8`, where the field is below `1e-12` on the boundary.
    pub fn for_box(self, l: f64) -> Self {
        match self {
            InitialData::GaussianVortex { .. } => InitialData::GaussianVortex { width: l / 8.0 },
            other => other,
        }
    }

    /// Samples the field on `grid` without projecting.
    pub fn sample<T: Real>(&self, grid: &Grid3<T>) -> Result<VectorField3<T>> {
        let k = grid.k0();
        match *self {
            InitialData::Beltrami { a, b, c } => {
                let (a, b, c) = (T::lit(a), T::lit(b), T::lit(c));
                Ok(VectorField3::from_fn(*grid, |p| {
                    let [x, y, z] = p.map(|v| v * k);
                    [a * z.sin() + c * y.cos(), b * x.sin() + a * z.cos(), c * y.sin() + b * x.cos()]
                }))
            }
            InitialData::TaylorGreen => Ok(VectorField3::from_fn(*grid, |p| {
                let [x, y, z] = p.map(|v| v * k);
                [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), T::zero()]
            })),
            InitialData::RandomBandLimited { seed, kmax } => random_band_limited(grid, seed, kmax),
            InitialData::GaussianVortex { width } => {
                if !(width > 0.0) {
                    return Err(Error::Config("vortex width must be positive".into()));
                }
                let w = T::lit(width);
                let s = T::lit(0.5f64.exp()) / w;
                Ok(VectorField3::from_fn(*grid, |p| {
                    let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                    let g = (-r2 / (T::lit(2.0) * w * w)).exp() * s;
                    [-p[1] * g, p[0] * g, T::zero()]
                }))
            }
        }
    }
}

fn random_band_limited<T: Real>(grid: &Grid3<T>, seed: u64, kmax: usize) -> Result<VectorField3<T>> {
    if kmax == 0 || kmax >= grid.n() / 2 {
        return Err(Error::Config(format!("kmax must lie in 1..{}", grid.n() / 2)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: [ScalarField<T>; 3] = std::array::from_fn(|_| {
        let data = (0..grid.len())
            .map(|idx| {
                let m = grid.wave(idx).m;
                if m.iter().all(|&v| v.unsigned_abs() <= kmax) && m != [0, 0, 0] {
                    let re: f64 = rng.gen_range(-1.0..1.0);
                    let im: f64 = rng.gen_range(-1.0..1.0);
                    Complex::new(T::lit(re), T::lit(im))
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Spectrum::from_vec(*grid, data).to_real()
    });
    let v = super::project_field(&VectorField3::from_components(comps));
    let m = v.max_norm();
    if m == T::zero() {
        return Err(Error::Config("random field vanished".into()));
    }
    Ok(v.scale(T::one() / m))
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Beltrami { .. } => write!(f, "beltrami"),
            InitialData::TaylorGreen => write!(f, "tg"),
            InitialData::RandomBandLimited { seed, .. } => write!(f, "random:{seed}"),
            InitialData::GaussianVortex { .. } => write!(f, "gaussian"),
        }
    }
}

/// Parses the CLI spellings `beltrami`, `tg`, `random:<seed>` and `gaussian`.
/// `random` uses `kmax = 4`; `gaussian` gets width 1 until [`InitialData::for_box`].
impl FromStr for InitialData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beltrami" => Ok(Self::beltrami()),
            "tg" => Ok(InitialData::TaylorGreen),
            "gaussian" => Ok(InitialData::GaussianVortex { width: 1.0 }),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(|seed| InitialData::RandomBandLimited { seed, kmax: 4 })
                    .map_err(|_| Error::Config(format!("bad seed in {s:?}"))),
                None => Err(Error::Config(format!("unknown initial data {s:?}"))),
            },
        }
    }
}
