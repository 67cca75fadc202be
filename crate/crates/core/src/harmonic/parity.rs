use serde::Serialize;

use super::MultiplierOp;
use crate::grid::spectral::Spectrum;
use crate::grid::ScalarField;
use crate::real::Real;

/// Parity in `y₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Neither => Parity::Neither,
        }
    }

    /// Classifies `f` with an absolute tolerance relative to `max|f|`.
    pub fn of<T: Real>(f: &ScalarField<T>, rel_tol: T) -> Self {
        let tol = rel_tol * f.max_abs();
        if f.parity_defect(true) <= tol {
            Parity::Even
        } else if f.parity_defect(false) <= tol {
            Parity::Odd
        } else {
            Parity::Neither
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParityReport {
    pub input: Parity,
    /// Expected parity of `R₁f, R₂f, R₃f`.
    pub expected: [Parity; 3],
    /// Distance of each `R_jf` from its expected parity, in max norm.
    pub defects: [f64; 3],
    pub max_defect: f64,
}

impl ParityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.input != Parity::Neither && self.max_defect <= tol
    }
}

/// Checks that `R₁, R₂` keep the `y₃`-parity of `f` and `R₃` flips it.
///
/// When `f` has no parity the defects are reported against the even/odd
/// split anyway: `R_j` applied to the even part of `f`.
pub fn parity_check<T: Real>(f: &ScalarField<T>) -> ParityReport {
    let input = Parity::of(f, T::lit(1e-12));
    let (src, base) = match input {
        Parity::Neither => (f.parity_part(true), Parity::Even),
        p => (f.clone(), p),
    };
    let expected = [base, base, base.flip()];
    let spec = Spectrum::forward(&src);
    let mut defects = [0.0; 3];
    for (j, d) in defects.iter_mut().enumerate() {
        let r = MultiplierOp::riesz(j).apply_spectrum(&spec).to_real();
        *d = r.parity_defect(expected[j] == Parity::Even).to_f64_();
    }
    let max_defect = defects.iter().cloned().fold(0.0, f64::max);
    let expected = if input == Parity::Neither { [Parity::Neither; 3] } else { expected };
    ParityReport { input, expected, defects, max_defect }
}
