//! Campanato, Morrey and Hölder norms with variable growth, sampled over
//! finite ball and pair families.
//!
//! Every supremum is a maximum over an explicit family; ties go to the lowest
//! index so reports are reproducible regardless of thread count.

pub mod harness;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{mean_over, Ball, BallFamily, Grid3, ScalarField};
use crate::growth::GrowthFunction;
use crate::real::{pow_abs, root, Real};

pub use harness::{
    embedding_constant, equivalence_harness, origin_oscillation_constant, HarnessRequest, HarnessRow, HarnessTable,
};

/// Which norm to compute.
#[derive(Clone, Debug)]
pub enum NormKind<T: Real> {
    Campanato { p: T, phi: GrowthFunction<T> },
    PointedCampanato { p: T, phi: GrowthFunction<T> },
    Morrey { p: T, phi: GrowthFunction<T> },
    Holder { phi: GrowthFunction<T> },
    PointedHolder { phi: GrowthFunction<T> },
    LipOnBall { alpha: T, ball: Ball<T> },
}

/// Where a sampled supremum was attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Argmax<T> {
    Ball(Ball<T>),
    Pair([T; 3], [T; 3]),
    /// Every sample gave zero.
    None,
}

impl<T: Real> fmt::Display for Argmax<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Argmax::Ball(b) => write!(f, "{b}"),
            Argmax::Pair(x, y) => write!(f, "({}, {}, {}) ~ ({}, {}, {})", x[0], x[1], x[2], y[0], y[1], y[2]),
            Argmax::None => write!(f, "-"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport<T> {
    /// Seminorm plus point term.
    pub value: T,
    /// The supremum part alone.
    pub seminorm: T,
    pub argmax: Argmax<T>,
    /// Index of the maximizing ball or pair in its family.
    pub argmax_index: Option<usize>,
    pub family: String,
    /// `|f_{B(0,1)}|` or `|f(0)|` for pointed norms.
    pub point_term: Option<T>,
}

/// A ball family with node lists resolved on one grid.
#[derive(Clone, Debug)]
pub struct PreparedFamily<T> {
    grid: Grid3<T>,
    family: BallFamily<T>,
    nodes: Vec<Vec<usize>>,
}

impl<T: Real> PreparedFamily<T> {
    pub fn new(grid: &Grid3<T>, family: &BallFamily<T>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Config("ball family is empty".into()));
        }
        let nodes = family.balls.par_iter().map(|b| b.node_indices(grid)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *grid, family: family.clone(), nodes })
    }

    pub fn grid(&self) -> &Grid3<T> {
        &self.grid
    }

    pub fn family(&self) -> &BallFamily<T> {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Keeps only the balls whose index passes `keep`.
    pub fn subset<F: Fn(usize, &Ball<T>) -> bool>(&self, keep: F, descriptor: &str) -> Self {
        let mut balls = Vec::new();
        let mut nodes = Vec::new();
        for (i, b) in self.family.balls.iter().enumerate() {
            if keep(i, b) {
                balls.push(*b);
                nodes.push(self.nodes[i].clone());
            }
        }
        Self { grid: self.grid, family: BallFamily::new(balls, descriptor), nodes }
    }

    fn phi_values(&self, phi: &GrowthFunction<T>) -> Result<Vec<T>> {
        self.family.balls.iter().map(|b| phi.eval(&b.center, b.radius)).collect()
    }
}

fn check_grid<T: Real>(f: &ScalarField<T>, fam: &PreparedFamily<T>) -> Result<()> {
    if f.grid() != fam.grid() {
        return Err(Error::Config("field and ball family live on different grids".into()));
    }
    Ok(())
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if p >= T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("p must be >= 1, got {p}")))
    }
}

/// Index-ordered argmax; the lowest index wins ties.
fn argmax<T: Real>(vals: &[T]) -> (T, Option<usize>) {
    let mut best = T::zero();
    let mut at = None;
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            at = Some(i);
        }
    }
    (best, at)
}

fn ball_report<T: Real>(vals: &[T], fam: &PreparedFamily<T>, point_term: Option<T>) -> NormReport<T> {
    let (seminorm, at) = argmax(vals);
    NormReport {
        value: seminorm + point_term.unwrap_or(T::zero()),
        seminorm,
        argmax: at.map_or(Argmax::None, |i| Argmax::Ball(fam.family.balls[i])),
        argmax_index: at,
        family: fam.family.descriptor.clone(),
        point_term,
    }
}

/// `(mean over nodes of |f - c|^p)^{1/p}` with `c` the node mean when `centered`.
fn ball_oscillation<T: Real>(data: &[T], nodes: &[usize], p: T, centered: bool) -> T {
    let m = T::from_usize_(nodes.len());
    let c = if centered { nodes.iter().fold(T::zero(), |s, &i| s + data[i]) / m } else { T::zero() };
    let s = nodes.iter().fold(T::zero(), |s, &i| s + pow_abs(data[i] - c, p));
    root(s / m, p)
}

fn per_ball<T: Real>(f: &ScalarField<T>, p: T, phi: &GrowthFunction<T>, fam: &PreparedFamily<T>, centered: bool) -> Result<Vec<T>> {
    check_grid(f, fam)?;
    check_p(p)?;
    let phis = fam.phi_values(phi)?;
    let data = f.data();
    Ok(fam
        .nodes
        .par_iter()
        .zip(phis.par_iter())
        .map(|(nodes, &ph)| ball_oscillation(data, nodes, p, centered) / ph)
        .collect())
}

/// `|f_{B(0,1)}|`.
pub fn unit_ball_mean<T: Real>(f: &ScalarField<T>) -> Result<T> {
    let b = Ball::new([T::zero(); 3], T::one())?;
    let nodes = b.node_indices(f.grid())?;
    Ok(mean_over(f.data(), &nodes).abs())
}

/// `max_B φ(B)^{-1} (|B|^{-1} ∫_B |f - f_B|^p)^{1/p}`.
pub fn campanato_norm<T: Real>(f: &ScalarField<T>, p: T, phi: &GrowthFunction<T>, fam: &PreparedFamily<T>) -> Result<NormReport<T>> {
    Ok(ball_report(&per_ball(f, p, phi, fam, true)?, fam, None))
}

/// Campanato seminorm plus `|f_{B(0,1)}|`.
pub fn pointed_campanato_norm<T: Real>(
    f: &ScalarField<T>,
    p: T,
    phi: &GrowthFunction<T>,
    fam: &PreparedFamily<T>,
) -> Result<NormReport<T>> {
    let pt = unit_ball_mean(f)?;
    Ok(ball_report(&per_ball(f, p, phi, fam, true)?, fam, Some(pt)))
}

/// `max_B φ(B)^{-1} (|B|^{-1} ∫_B |f|^p)^{1/p}`.
pub fn morrey_norm<T: Real>(f: &ScalarField<T>, p: T, phi: &GrowthFunction<T>, fam: &PreparedFamily<T>) -> Result<NormReport<T>> {
    Ok(ball_report(&per_ball(f, p, phi, fam, false)?, fam, None))
}

/// Node pairs for Hölder-type norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFamily {
    /// All pairs when `N ≤ 16`, otherwise all pairs among every `(N/16)`-th node.
    Auto,
    /// All pairs among nodes whose indices are multiples of `stride` on every axis.
    Strided(usize),
}

impl PairFamily {
    fn stride<T: Real>(&self, grid: &Grid3<T>) -> Result<usize> {
        let s = match *self {
            PairFamily::Auto => (grid.n() / 16).max(1),
            PairFamily::Strided(s) => s,
        };
        if s == 0 || grid.n() % s != 0 {
            return Err(Error::Config(format!("pair stride {s} must divide N = {}", grid.n())));
        }
        Ok(s)
    }

    fn describe(&self, stride: usize) -> String {
        format!("pairs:stride={stride}")
    }
}

/// `max 2|f(x) - f(y)| / (φ(x,|x-y|) + φ(y,|x-y|))` over node pairs, with
/// Euclidean distance inside the principal cell.
pub fn holder_norm<T: Real>(f: &ScalarField<T>, phi: &GrowthFunction<T>, pairs: PairFamily) -> Result<NormReport<T>> {
    let g = *f.grid();
    let stride = pairs.stride(&g)?;
    let nodes: Vec<usize> = (0..g.len())
        .filter(|&i| g.unidx(i).iter().all(|&c| c % stride == 0))
        .collect();
    if nodes.len() < 2 {
        return Err(Error::Config("pair family is empty".into()));
    }
    let pts: Vec<[T; 3]> = nodes.iter().map(|&i| g.point(i)).collect();
    let data = f.data();
    let two = T::lit(2.0);
    // per first node: best value and partner, reduced in index order afterwards
    let rows: Vec<Result<(T, usize)>> = (0..nodes.len())
        .into_par_iter()
        .map(|a| {
            let mut best = (T::zero(), usize::MAX);
            let (xa, fa) = (pts[a], data[nodes[a]]);
            for b in a + 1..nodes.len() {
                let df = (fa - data[nodes[b]]).abs();
                if df == T::zero() {
                    continue;
                }
                let xb = pts[b];
                let d = ((xa[0] - xb[0]).powi(2) + (xa[1] - xb[1]).powi(2) + (xa[2] - xb[2]).powi(2)).sqrt();
                let v = two * df / (phi.eval(&xa, d)? + phi.eval(&xb, d)?);
                if v > best.0 {
                    best = (v, b);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = T::zero();
    let mut at = None;
    for (a, r) in rows.into_iter().enumerate() {
        let (v, b) = r?;
        if v > best {
            best = v;
            at = Some((a, b));
        }
    }
    Ok(NormReport {
        value: best,
        seminorm: best,
        argmax: at.map_or(Argmax::None, |(a, b)| Argmax::Pair(pts[a], pts[b])),
        argmax_index: at.map(|(a, b)| a * nodes.len() + b),
        family: pairs.describe(stride),
        point_term: None,
    })
}

/// Hölder seminorm plus `|f(0)|`.
pub fn pointed_holder_norm<T: Real>(f: &ScalarField<T>, phi: &GrowthFunction<T>, pairs: PairFamily) -> Result<NormReport<T>> {
    let mut r = holder_norm(f, phi, pairs)?;
    let pt = f.at_origin().abs();
    r.value = r.seminorm + pt;
    r.point_term = Some(pt);
    Ok(r)
}

/// `max |f(x) - f(y)| / |x - y|^α` over node pairs inside `ball`.
pub fn lip_norm_on_ball<T: Real>(f: &ScalarField<T>, alpha: T, ball: &Ball<T>) -> Result<T> {
    let g = *f.grid();
    let nodes = ball.node_indices_min(&g, 2).map_err(|e| match e {
        Error::BallTooSmall { nodes, .. } => Error::BallTooSmall { nodes, min: 2 },
        other => other,
    })?;
    // positions unwrapped around the center
    let pts: Vec<[T; 3]> = nodes
        .iter()
        .map(|&i| {
            let p = g.point(i);
            [
                ball.center[0] + g.torus_delta(p[0], ball.center[0]),
                ball.center[1] + g.torus_delta(p[1], ball.center[1]),
                ball.center[2] + g.torus_delta(p[2], ball.center[2]),
            ]
        })
        .collect();
    let data = f.data();
    let mut best = T::zero();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let d2 = (pts[a][0] - pts[b][0]).powi(2) + (pts[a][1] - pts[b][1]).powi(2) + (pts[a][2] - pts[b][2]).powi(2);
            let v = (data[nodes[a]] - data[nodes[b]]).abs() / d2.sqrt().powf(alpha);
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// Torus surrogate for `lim f_{B(0,r)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaReport<T> {
    /// Global mean of `f`.
    pub sigma: T,
    /// `(r, f_{B(0,r)})` for the three largest dyadic radii below `L`.
    pub ball_means: Vec<(T, T)>,
    /// `max - min` of the ball means.
    pub spread: T,
}

impl<T: Real> SigmaReport<T> {
    /// The extrapolated limit, accepted when the ball means agree within `tol`.
    pub fn extrapolated(&self, tol: T) -> Option<T> {
        let last = self.ball_means.last()?.1;
        if self.spread <= tol {
            Some(last)
        } else {
            None
        }
    }
}

pub fn sigma_limit<T: Real>(f: &ScalarField<T>) -> Result<SigmaReport<T>> {
    let g = *f.grid();
    let mut radii = crate::grid::Radii::Dyadic.resolve(&g)?;
    let keep = radii.len().saturating_sub(3);
    radii.drain(..keep);
    let mut ball_means = Vec::new();
    for r in radii {
        let b = Ball::new([T::zero(); 3], r)?;
        match b.node_indices(&g) {
            Ok(nodes) => ball_means.push((r, mean_over(f.data(), &nodes))),
            Err(Error::BallTooSmall { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (lo, hi) = ball_means.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &(_, m)| (a.min(m), b.max(m)));
    let spread = if ball_means.is_empty() { T::zero() } else { hi - lo };
    Ok(SigmaReport { sigma: f.mean(), ball_means, spread })
}

/// Evaluates any [`NormKind`]; Hölder kinds use [`PairFamily::Auto`].
pub fn compute_norm<T: Real>(f: &ScalarField<T>, kind: &NormKind<T>, fam: &PreparedFamily<T>) -> Result<NormReport<T>> {
    match kind {
        NormKind::Campanato { p, phi } => campanato_norm(f, *p, phi, fam),
        NormKind::PointedCampanato { p, phi } => pointed_campanato_norm(f, *p, phi, fam),
        NormKind::Morrey { p, phi } => morrey_norm(f, *p, phi, fam),
        NormKind::Holder { phi } => holder_norm(f, phi, PairFamily::Auto),
        NormKind::PointedHolder { phi } => pointed_holder_norm(f, phi, PairFamily::Auto),
        NormKind::LipOnBall { alpha, ball } => {
            let v = lip_norm_on_ball(f, *alpha, ball)?;
            Ok(NormReport {
                value: v,
                seminorm: v,
                argmax: Argmax::Ball(*ball),
                argmax_index: None,
                family: format!("lip:{ball}"),
                point_term: None,
            })
        }
    }
}
