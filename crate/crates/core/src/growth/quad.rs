//! Adaptive Gauss–Kronrod (G7/K15) quadrature.

use crate::error::{Error, Result};
use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.000_000_000_000_000_000_000_000_000_000_0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_9,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resg = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = hl * T::lit(XGK[j]);
        let s = f(center - dx) + f(center + dx);
        resk = resk + T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            resg = resg + T::lit(WG[j / 2]) * s;
        }
    }
    (resk * hl, ((resk - resg) * hl).abs())
}

/// Integrates `f` over the finite interval `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (total, err) = kronrod15(&f, a, b);
    let mut intervals = vec![(a, b, total, err)];
    let mut sum = total;
    let mut err_sum = err;
    let tiny = T::min_positive_value() * T::lit(1e6);
    for _ in 0..2000 {
        if !sum.is_finite() {
            return Err(Error::Divergence("integrand is not finite".into()));
        }
        if err_sum <= rel_tol * sum.abs() || err_sum <= tiny {
            return Ok(sum);
        }
        // bisect the interval carrying the largest error estimate
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, val, e) = intervals.swap_remove(idx);
        let mid = T::lit(0.5) * (lo + hi);
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        sum = sum - val + v1 + v2;
        err_sum = err_sum - e + e1 + e2;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    if err_sum <= T::lit(1e3) * rel_tol * sum.abs() {
        Ok(sum)
    } else {
        Err(Error::Divergence(format!(
            "quadrature did not converge (estimate {}, error {})",
            sum, err_sum
        )))
    }
}

/// Integrates `g` over `[0, ∞)` through the map `s = u / (1 - u)`.
pub fn integrate_half_line<T: Real, F: Fn(T) -> T>(g: F, rel_tol: T) -> Result<T> {
    let one = T::one();
    integrate(
        |u: T| {
            let w = one - u;
            g(u / w) / (w * w)
        },
        T::zero(),
        one,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 t^{-1/2} dt = 2
        let v = integrate(|t: f64| t.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn half_line_exponential() {
        let v = integrate_half_line(|s: f64| (-0.75 * s).exp(), 1e-12).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10);
    }
}
