use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::Frame;
use crate::grid::spectral::Spectrum;
use crate::grid::{Grid3, ScalarField, VectorField3};
use crate::real::Real;

/// How off-node values are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resample {
    /// Band-limited upsampling by 2 followed by 8-point Lagrange interpolation.
    #[default]
    Spectral,
    Trilinear,
}

const STENCIL: usize = 8;

/// Trigonometric upsampling to `2N` per axis; node values of the coarse grid are preserved.
fn upsample<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let g = f.grid();
    let n = g.n();
    let m = 2 * n;
    let fine = Grid3::new(m, g.l()).expect("doubled grid");
    let s = Spectrum::forward(f);
    let half = T::lit(0.5);
    // fine index -> (coarse index, weight)
    let map: Vec<Option<(usize, T)>> = (0..m)
        .map(|k| {
            let w = fine.wavenumber(k);
            let h = (n / 2) as isize;
            if w.abs() < h {
                Some((w.rem_euclid(n as isize) as usize, T::one()))
            } else if w.abs() == h {
                Some((n / 2, half))
            } else {
                None
            }
        })
        .collect();
    let mut data = vec![Complex::new(T::zero(), T::zero()); fine.len()];
    for i in 0..m {
        let Some((ci, wi)) = map[i] else { continue };
        for j in 0..m {
            let Some((cj, wj)) = map[j] else { continue };
            for k in 0..m {
                let Some((ck, wk)) = map[k] else { continue };
                data[fine.idx(i, j, k)] = s.data()[g.idx(ci, cj, ck)] * (wi * wj * wk);
            }
        }
    }
    let scale = T::from_usize_(fine.len()) / T::from_usize_(g.len());
    Spectrum::from_vec(fine, data).to_real().scale(scale)
}

fn lagrange_weights<T: Real>(t: T) -> [T; STENCIL] {
    // nodes at -3..=4 relative to floor
    let nodes: [T; STENCIL] = std::array::from_fn(|a| T::lit(a as f64 - 3.0));
    std::array::from_fn(|a| {
        let mut w = T::one();
        for b in 0..STENCIL {
            if a != b {
                w = w * (t - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        w
    })
}

/// Continuous node index of `x` on `g`, snapped to an integer when within `1e-9`.
fn continuous_index<T: Real>(g: &Grid3<T>, x: T) -> (i64, T) {
    let s = (x + g.l()) / g.h();
    let r = s.round();
    if (s - r).abs() <= T::lit(1e-9) {
        return (r.to_i64().unwrap_or(0), T::zero());
    }
    let f = s.floor();
    (f.to_i64().unwrap_or(0), s - f)
}

struct Sampler<'a, T: Real> {
    coarse: &'a [&'a ScalarField<T>],
    fine: Vec<ScalarField<T>>,
    method: Resample,
}

impl<'a, T: Real> Sampler<'a, T> {
    fn new(coarse: &'a [&'a ScalarField<T>], method: Resample) -> Self {
        let fine = match method {
            Resample::Spectral => coarse.par_iter().map(|f| upsample(f)).collect(),
            Resample::Trilinear => Vec::new(),
        };
        Self { coarse, fine, method }
    }

    fn sample(&self, x: [T; 3], out: &mut [T]) {
        let g = self.coarse[0].grid();
        let n = g.n() as i64;
        let ci: [(i64, T); 3] = std::array::from_fn(|a| continuous_index(g, x[a]));
        if ci.iter().all(|c| c.1 == T::zero()) {
            let idx = g.idx(ci[0].0.rem_euclid(n) as usize, ci[1].0.rem_euclid(n) as usize, ci[2].0.rem_euclid(n) as usize);
            for (o, f) in out.iter_mut().zip(self.coarse) {
                *o = f.data()[idx];
            }
            return;
        }
        match self.method {
            Resample::Trilinear => {
                for o in out.iter_mut() {
                    *o = T::zero();
                }
                for corner in 0..8usize {
                    let mut w = T::one();
                    let mut ijk = [0usize; 3];
                    for a in 0..3 {
                        let up = (corner >> a) & 1 == 1;
                        w = w * if up { ci[a].1 } else { T::one() - ci[a].1 };
                        ijk[a] = (ci[a].0 + up as i64).rem_euclid(n) as usize;
                    }
                    if w == T::zero() {
                        continue;
                    }
                    let idx = g.idx(ijk[0], ijk[1], ijk[2]);
                    for (o, f) in out.iter_mut().zip(self.coarse) {
                        *o = *o + w * f.data()[idx];
                    }
                }
            }
            Resample::Spectral => {
                let fg = self.fine[0].grid();
                let m = fg.n() as i64;
                let fi: [(i64, T); 3] = std::array::from_fn(|a| continuous_index(fg, x[a]));
                let w: [[T; STENCIL]; 3] = std::array::from_fn(|a| lagrange_weights(fi[a].1));
                for o in out.iter_mut() {
                    *o = T::zero();
                }
                for a in 0..STENCIL {
                    let i = (fi[0].0 + a as i64 - 3).rem_euclid(m) as usize;
                    for b in 0..STENCIL {
                        let j = (fi[1].0 + b as i64 - 3).rem_euclid(m) as usize;
                        let wab = w[0][a] * w[1][b];
                        let row = fg.idx(i, j, 0);
                        for c in 0..STENCIL {
                            let k = (fi[2].0 + c as i64 - 3).rem_euclid(m) as usize;
                            let wt = wab * w[2][c];
                            for (o, f) in out.iter_mut().zip(&self.fine) {
                                *o = *o + wt * f.data()[row + k];
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Resamples `v` and `dv` into the `y`-coordinates of `frame` centered at node `x_m`,
/// projecting each onto `n₁, n₂, τ`.
pub(super) fn resample_pair<T: Real>(
    v: &VectorField3<T>,
    dv: &VectorField3<T>,
    frame: &Frame<T>,
    x_m: usize,
    method: Resample,
) -> (VectorField3<T>, VectorField3<T>) {
    let g = *v.grid();
    if let Some(perm) = frame.signed_permutation() {
        return (permute(v, &perm, x_m), permute(dv, &perm, x_m));
    }
    let fields: Vec<&ScalarField<T>> = v.components().iter().chain(dv.components().iter()).collect();
    let sampler = Sampler::new(&fields, method);
    let origin = g.point(x_m);
    let axes = frame.axes();
    let values: Vec<[T; 6]> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let y = g.point(idx);
            let d = frame.to_world(y);
            let x = [origin[0] + d[0], origin[1] + d[1], origin[2] + d[2]];
            let mut raw = [T::zero(); 6];
            sampler.sample(x, &mut raw);
            let mut out = [T::zero(); 6];
            for k in 0..3 {
                for c in 0..3 {
                    out[k] = out[k] + axes[k][c] * raw[c];
                    out[3 + k] = out[3 + k] + axes[k][c] * raw[3 + c];
                }
            }
            out
        })
        .collect();
    let build = |off: usize| {
        VectorField3::from_components(std::array::from_fn(|k| {
            ScalarField::from_vec(g, values.iter().map(|o| o[off + k]).collect()).expect("grid length")
        }))
    };
    (build(0), build(3))
}

/// Exact resampling for frames made of signed basis vectors.
fn permute<T: Real>(v: &VectorField3<T>, perm: &[(usize, bool); 3], x_m: usize) -> VectorField3<T> {
    let g = *v.grid();
    let n = g.n() as isize;
    let half = n / 2;
    let base = g.unidx(x_m);
    VectorField3::from_components(std::array::from_fn(|k| {
        ScalarField::from_vec(
            g,
            (0..g.len())
                .map(|idx| {
                    let y = g.unidx(idx);
                    let mut x = [0usize; 3];
                    for (a, &(c, neg)) in perm.iter().enumerate() {
                        let off = y[a] as isize - half;
                        let off = if neg { -off } else { off };
                        x[c] = (base[c] as isize + off).rem_euclid(n) as usize;
                    }
                    let w = v.at(g.idx(x[0], x[1], x[2]));
                    let (c, neg) = perm[k];
                    if neg {
                        -w[c]
                    } else {
                        w[c]
                    }
                })
                .collect(),
        )
        .expect("grid length")
    }))
}
