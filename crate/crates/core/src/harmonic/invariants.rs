use serde::Serialize;

use super::{modified_riesz, parity_check, riesz, riesz_pair, MultiplierOp};
use crate::error::Result;
use crate::grid::{Grid3, ScalarField};
use crate::synth::Synth;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl InvariantRow {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, holds: value <= tolerance }
    }
}

/// The Riesz identity table on an `n³` grid with `L = 2π`, using seeded
/// band-limited fields.
pub fn riesz_invariants(n: usize, seed: u64) -> Result<Vec<InvariantRow>> {
    let g = Grid3::<f64>::new(n, 2.0 * std::f64::consts::PI)?;
    let mut syn = Synth::new(seed);
    let kmax = (n / 4).max(1);
    let f = syn.mean_zero(&g, kmax);
    let f2 = syn.mean_zero(&g, kmax);
    let mut rows = Vec::new();

    let mut sum = f.clone();
    for j in 0..3 {
        sum = sum.add(&riesz(&riesz(&f, j), j));
    }
    rows.push(InvariantRow::new("sum_rj_squared_plus_identity", sum.max_abs() / f.max_abs(), 1e-12));

    let s = ScalarField::from_fn(g, |p| p[0].sin());
    let c = ScalarField::from_fn(g, |p| p[0].cos());
    rows.push(InvariantRow::new("r1_sin_plus_cos", riesz(&s, 0).add(&c).max_abs(), 1e-12));

    let one = ScalarField::constant(g, 1.0);
    let mut m: f64 = 0.0;
    for axis in 0..3 {
        m = m.max(modified_riesz(&one, axis, 2.0 * g.h())?.field.at_origin().abs());
    }
    rows.push(InvariantRow::new("modified_of_constant_at_origin", m, 1e-3));

    let mut parity: f64 = 0.0;
    for even in [true, false] {
        parity = parity.max(parity_check(&syn.band_limited(&g, kmax).parity_part(even)).max_defect);
    }
    rows.push(InvariantRow::new("parity_table", parity, 1e-12));

    let mut imag: f64 = 0.0;
    let mut comm: f64 = 0.0;
    let mut lin: f64 = 0.0;
    for i in 0..3 {
        imag = imag.max(MultiplierOp::riesz(i).apply_checked(&f).1);
        let combo = f.scale(2.0).add(&f2.scale(-3.0));
        let d = riesz(&combo, i).sub(&riesz(&f, i).scale(2.0)).sub(&riesz(&f2, i).scale(-3.0));
        lin = lin.max(d.max_abs() / combo.max_abs());
        for j in 0..3 {
            comm = comm.max(riesz(&riesz(&f, i), j).sub(&riesz_pair(&f, i, j)).max_abs() / f.max_abs());
        }
    }
    rows.push(InvariantRow::new("imaginary_residue", imag, 1e-13));
    rows.push(InvariantRow::new("linearity", lin, 1e-12));
    rows.push(InvariantRow::new("commutation", comm, 1e-12));
    Ok(rows)
}
