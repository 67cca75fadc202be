//! Sampled checks of the doubling, nearness and almost-increasing conditions.

use serde::Serialize;

use super::GrowthFunction;
use crate::error::{Error, Result};
use crate::real::Real;

/// Finite family over which the universally quantified conditions are probed.
#[derive(Clone, Debug)]
pub struct SampleSpec<T> {
    pub centers: Vec<Vec<T>>,
    pub radii: Vec<T>,
    /// Ratios `s/r`, each in `[1/2, 2]`, used by the doubling check.
    pub ratios: Vec<T>,
}

impl<T: Real> SampleSpec<T> {
    /// `side`ⁿ lattice centers in `[-extent, extent]ⁿ` and `count` log-spaced radii in `[r_min, r_max]`.
    pub fn lattice(n: usize, side: usize, extent: T, count: usize, r_min: T, r_max: T) -> Self {
        let axis: Vec<T> = if side == 1 {
            vec![T::zero()]
        } else {
            (0..side)
                .map(|i| -extent + T::lit(2.0) * extent * T::from_usize_(i) / T::from_usize_(side - 1))
                .collect()
        };
        let total = side.pow(n as u32);
        let centers = (0..total)
            .map(|mut idx| {
                let mut c = vec![T::zero(); n];
                for k in (0..n).rev() {
                    c[k] = axis[idx % side];
                    idx /= side;
                }
                c
            })
            .collect();
        Self { centers, radii: log_spaced(r_min, r_max, count), ratios: default_ratios() }
    }

    /// 5ⁿ centers in `[-4, 4]ⁿ` × 32 radii in `[2⁻⁶, 2⁶]`.
    pub fn default_for(n: usize) -> Self {
        Self::lattice(n, 5, T::lit(4.0), 32, T::lit(1.0 / 64.0), T::lit(64.0))
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Config("sample family is empty".into()));
        }
        if self.radii.iter().any(|&r| !(r > T::zero())) {
            return Err(Error::Config("sample radii must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn log_spaced<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * T::from_usize_(i) / T::from_usize_(count - 1)).exp())
        .collect()
}

fn default_ratios<T: Real>() -> Vec<T> {
    [0.5, std::f64::consts::FRAC_1_SQRT_2, 1.0, std::f64::consts::SQRT_2, 2.0].iter().map(|&v| T::lit(v)).collect()
}

/// One condition's empirical constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionFragment {
    pub holds: bool,
    pub constant: f64,
    pub samples: usize,
}

impl ConditionFragment {
    fn from_max(max: f64, samples: usize) -> Self {
        let constant = max.max(1.0);
        Self { holds: constant.is_finite(), constant, samples }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionReport {
    pub doubling: ConditionFragment,
    pub nearness: ConditionFragment,
    pub almost_increasing: ConditionFragment,
    pub dini_lower_constant: Option<f64>,
    pub dini_upper_constant: Option<f64>,
    pub sample_count: usize,
}

fn two_sided<T: Real>(a: T, b: T) -> f64 {
    (a / b).max(b / a).to_f64_()
}

/// `A1 = max φ(x,s)/φ(x,r)` in both directions over sampled `s/r ∈ [1/2, 2]`.
pub fn check_doubling<T: Real>(gf: &GrowthFunction<T>, spec: &SampleSpec<T>) -> Result<ConditionFragment> {
    spec.validate()?;
    let (half, two) = (T::lit(0.5), T::lit(2.0));
    if spec.ratios.is_empty() || spec.ratios.iter().any(|&q| q < half || q > two) {
        return Err(Error::Config("doubling ratios must lie in [1/2, 2]".into()));
    }
    let mut max = 1.0f64;
    let mut count = 0;
    for x in &spec.centers {
        for &r in &spec.radii {
            let fr = gf.eval(x, r)?;
            for &q in &spec.ratios {
                max = max.max(two_sided(gf.eval(x, r * q)?, fr));
                count += 1;
            }
        }
    }
    Ok(ConditionFragment::from_max(max, count))
}

/// `A2 = max φ(x,r)/φ(y,r)` in both directions over sampled `|x - y| ≤ r`.
///
/// Neighbours are the `2n` axis points `x ± r e_k` plus every other sample
/// center within distance `r`.
pub fn check_nearness<T: Real>(gf: &GrowthFunction<T>, spec: &SampleSpec<T>) -> Result<ConditionFragment> {
    spec.validate()?;
    let mut max = 1.0f64;
    let mut count = 0;
    for x in &spec.centers {
        for &r in &spec.radii {
            let fx = gf.eval(x, r)?;
            let mut probe = |y: &[T]| -> Result<()> {
                max = max.max(two_sided(fx, gf.eval(y, r)?));
                count += 1;
                Ok(())
            };
            for k in 0..x.len() {
                for sign in [T::one(), -T::one()] {
                    let mut y = x.clone();
                    y[k] = y[k] + sign * r;
                    probe(&y)?;
                }
            }
            for y in &spec.centers {
                let d2 = x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                if d2 <= r * r && d2 > T::zero() {
                    probe(y)?;
                }
            }
        }
    }
    Ok(ConditionFragment::from_max(max, count))
}

/// `A3 = max φ(x,r)/φ(x,s)` over sampled `r < s`.
pub fn check_almost_increasing<T: Real>(gf: &GrowthFunction<T>, spec: &SampleSpec<T>) -> Result<ConditionFragment> {
    spec.validate()?;
    let mut max = 1.0f64;
    let mut count = 0;
    let mut radii = spec.radii.clone();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    for x in &spec.centers {
        let vals = radii.iter().map(|&r| gf.eval(x, r)).collect::<Result<Vec<_>>>()?;
        // running max of φ(x, r) over r < s
        let mut best = T::zero();
        for (i, &v) in vals.iter().enumerate() {
            if i > 0 && radii[i] > radii[i - 1] {
                max = max.max((best / v).to_f64_());
                count += i;
            }
            if v > best {
                best = v;
            }
        }
    }
    Ok(ConditionFragment::from_max(max, count))
}

/// Largest ratio `integral / φ(x, r)` over the family, or `None` if any integral diverges.
fn dini_constant<T: Real, F>(gf: &GrowthFunction<T>, spec: &SampleSpec<T>, integral: F) -> Option<f64>
where
    F: Fn(&GrowthFunction<T>, &[T], T) -> Result<T>,
{
    let mut max = 0.0f64;
    for x in &spec.centers {
        for &r in &spec.radii {
            let v = integral(gf, x, r).ok()?;
            max = max.max((v / gf.eval(x, r).ok()?).to_f64_());
        }
    }
    Some(max)
}

/// All three conditions plus the Dini constants over one family.
pub fn check_conditions<T: Real>(gf: &GrowthFunction<T>, spec: &SampleSpec<T>) -> Result<ConditionReport> {
    Ok(ConditionReport {
        doubling: check_doubling(gf, spec)?,
        nearness: check_nearness(gf, spec)?,
        almost_increasing: check_almost_increasing(gf, spec)?,
        dini_lower_constant: dini_constant(gf, spec, |g, x, r| g.dini_lower(x, r)),
        dini_upper_constant: dini_constant(gf, spec, |g, x, r| g.dini_upper(x, r)),
        sample_count: spec.len(),
    })
}

/// Minimum and maximum of `a(x,r)/b(x,r)` over the family.
pub fn compare_growth<T: Real>(a: &GrowthFunction<T>, b: &GrowthFunction<T>, spec: &SampleSpec<T>) -> Result<(f64, f64)> {
    spec.validate()?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for x in &spec.centers {
        for &r in &spec.radii {
            let q = (a.eval(x, r)? / b.eval(x, r)?).to_f64_();
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    Ok((lo, hi))
}
