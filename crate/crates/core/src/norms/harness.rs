//! Ratio tables comparing norms that should be equivalent.
//!
//! Equivalence constants are reported, never asserted: only their finiteness
//! and stability under refinement can be checked numerically.

use serde::Serialize;

use super::{campanato_norm, morrey_norm, pointed_campanato_norm, PairFamily, PreparedFamily};
use crate::error::{Error, Result};
use crate::grid::{mean_over, Ball, ScalarField};
use crate::growth::{ConditionReport, GrowthFunction};
use crate::real::{pow_abs, root, Real};

/// Which comparisons the harness should run besides the `p₁`/`p₂` Campanato ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarnessRequest<T> {
    pub p1: T,
    pub p2: T,
    /// Campanato against Hölder; needs the lower Dini condition.
    pub holder: bool,
    /// Campanato against Morrey of `f - σ(f)`; needs the upper Dini condition.
    pub morrey: bool,
    pub pairs: PairFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessRow {
    pub index: usize,
    pub campanato_p1: f64,
    pub campanato_p2: f64,
    /// `‖f‖_{p₁} / ‖f‖_{p₂}`.
    pub ratio_p: f64,
    pub ratio_holder: Option<f64>,
    pub ratio_morrey: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessTable {
    pub family: String,
    pub rows: Vec<HarnessRow>,
    /// Fields dropped because their seminorm vanished.
    pub skipped: usize,
}

fn min_max(v: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    v.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((a, b)) => Some((a.min(x), b.max(x))),
    })
}

impl HarnessTable {
    pub fn ratio_p_range(&self) -> Option<(f64, f64)> {
        min_max(self.rows.iter().map(|r| r.ratio_p))
    }

    pub fn ratio_holder_range(&self) -> Option<(f64, f64)> {
        min_max(self.rows.iter().filter_map(|r| r.ratio_holder))
    }

    pub fn ratio_morrey_range(&self) -> Option<(f64, f64)> {
        min_max(self.rows.iter().filter_map(|r| r.ratio_morrey))
    }
}

/// Runs the comparisons on every non-constant field of `fields`.
pub fn equivalence_harness<T: Real>(
    fields: &[ScalarField<T>],
    phi: &GrowthFunction<T>,
    fam: &PreparedFamily<T>,
    conditions: &ConditionReport,
    req: &HarnessRequest<T>,
) -> Result<HarnessTable> {
    let mut missing = Vec::new();
    if !conditions.doubling.holds {
        missing.push("doubling");
    }
    if !conditions.nearness.holds {
        missing.push("nearness");
    }
    if req.holder && conditions.dini_lower_constant.is_none() {
        missing.push("dini-lower");
    }
    if req.morrey && conditions.dini_upper_constant.is_none() {
        missing.push("dini-upper");
    }
    if !missing.is_empty() {
        return Err(Error::Prerequisite(format!("unmet conditions: {}", missing.join(", "))));
    }
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (index, f) in fields.iter().enumerate() {
        let a = campanato_norm(f, req.p1, phi, fam)?.value;
        let b = campanato_norm(f, req.p2, phi, fam)?.value;
        if a == T::zero() || b == T::zero() {
            skipped += 1;
            continue;
        }
        let ratio_holder = if req.holder {
            let h = super::holder_norm(f, phi, req.pairs)?.value;
            Some((a / h).to_f64_())
        } else {
            None
        };
        let ratio_morrey = if req.morrey {
            let s = f.mean();
            let m = morrey_norm(&f.map(|v| v - s), req.p1, phi, fam)?.value;
            Some((a / m).to_f64_())
        } else {
            None
        };
        rows.push(HarnessRow {
            index,
            campanato_p1: a.to_f64_(),
            campanato_p2: b.to_f64_(),
            ratio_p: (a / b).to_f64_(),
            ratio_holder,
            ratio_morrey,
        });
    }
    Ok(HarnessTable { family: fam.family().descriptor.clone(), rows, skipped })
}

/// `|f(0) - f_{B(0,1)}|` divided by the Campanato seminorm with `φ = r^α`
/// over the balls of `fam` contained in `B(0,1)`.
///
/// Returns `None` when no ball of the family fits inside `B(0,1)` or the
/// seminorm vanishes.
pub fn origin_oscillation_constant<T: Real>(f: &ScalarField<T>, p: T, alpha: T, fam: &PreparedFamily<T>) -> Result<Option<T>> {
    let inner = fam.subset(
        |_, b| {
            let c = b.center;
            !b.is_covering() && (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + b.radius <= T::one()
        },
        "inside B(0,1)",
    );
    if inner.is_empty() {
        return Ok(None);
    }
    let semi = campanato_norm(f, p, &GrowthFunction::power_alpha(3, alpha), &inner)?.value;
    let unit = Ball::new([T::zero(); 3], T::one())?.node_indices(f.grid())?;
    let num = (f.at_origin() - mean_over(f.data(), &unit)).abs();
    if semi == T::zero() {
        return Ok(None);
    }
    Ok(Some(num / semi))
}

/// `(∫_{B*} |f|^p)^{1/p}` divided by the pointed Campanato norm.
pub fn embedding_constant<T: Real>(
    f: &ScalarField<T>,
    p: T,
    phi: &GrowthFunction<T>,
    fam: &PreparedFamily<T>,
    bstar: &Ball<T>,
) -> Result<T> {
    let nodes = bstar.node_indices(f.grid())?;
    let s = nodes.iter().fold(T::zero(), |acc, &i| acc + pow_abs(f.data()[i], p));
    let lp = root(s * f.grid().cell_volume(), p);
    let n = pointed_campanato_norm(f, p, phi, fam)?.value;
    if n == T::zero() {
        return Err(Error::Degenerate("pointed norm vanishes".into()));
    }
    Ok(lp / n)
}
