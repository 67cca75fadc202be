//! Balls on the periodic grid and deterministic ball families.

use std::fmt;

use super::{Grid3, ScalarField};
use crate::error::{Error, Result};
use crate::real::Real;

/// Fewest grid nodes a ball may contain before its average is rejected.
pub const MIN_BALL_NODES: usize = 8;

/// Open ball `B(x, r)` under the torus distance.
///
/// The special covering ball stands for the whole box: it contains every
/// node, has measure `(2L)³`, and reports the radius of the Euclidean ball
/// with that measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball<T> {
    pub center: [T; 3],
    pub radius: T,
    covering: bool,
}

impl<T: Real> Ball<T> {
    pub fn new(center: [T; 3], radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius, covering: false })
    }

    pub fn covering(grid: &Grid3<T>) -> Self {
        let three = T::lit(3.0);
        let r = (three * grid.volume() / (T::lit(4.0) * T::PI())).cbrt();
        Self { center: [T::zero(); 3], radius: r, covering: true }
    }

    pub fn is_covering(&self) -> bool {
        self.covering
    }

    /// Lebesgue measure of the ball (of the box for the covering ball).
    pub fn measure(&self, grid: &Grid3<T>) -> T {
        if self.covering {
            grid.volume()
        } else {
            T::lit(4.0 / 3.0) * T::PI() * self.radius * self.radius * self.radius
        }
    }

    /// Nodes strictly inside the ball, in increasing index order.
    pub fn node_indices(&self, grid: &Grid3<T>) -> Result<Vec<usize>> {
        self.node_indices_min(grid, MIN_BALL_NODES)
    }

    /// Like [`node_indices`](Self::node_indices) with a caller-chosen minimum count.
    pub fn node_indices_min(&self, grid: &Grid3<T>, min: usize) -> Result<Vec<usize>> {
        if self.covering {
            return Ok((0..grid.len()).collect());
        }
        if self.radius >= grid.l() {
            return Err(Error::Domain(format!("ball radius {} must be below L = {}", self.radius, grid.l())));
        }
        // work in lattice units; centers within 1e-9 of a node snap to it so that
        // node-centered balls have exact integer offsets
        let n = grid.n() as i64;
        let ru = self.radius / grid.h();
        let r2 = ru * ru;
        let mut s = [T::zero(); 3];
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..3 {
            let v = (self.center[a] + grid.l()) / grid.h();
            let vr = v.round();
            s[a] = if (v - vr).abs() < T::lit(1e-9) { vr } else { v };
            lo[a] = (s[a] - ru).floor().to_i64().unwrap_or(0);
            hi[a] = (s[a] + ru).ceil().to_i64().unwrap_or(0);
        }
        let w = |v: i64| v.rem_euclid(n) as usize;
        let mut out = Vec::new();
        for i in lo[0]..=hi[0] {
            let dx = T::lit(i as f64) - s[0];
            let dx2 = dx * dx;
            if dx2 >= r2 {
                continue;
            }
            for j in lo[1]..=hi[1] {
                let dy = T::lit(j as f64) - s[1];
                let dxy = dx2 + dy * dy;
                if dxy >= r2 {
                    continue;
                }
                for k in lo[2]..=hi[2] {
                    let dz = T::lit(k as f64) - s[2];
                    if dxy + dz * dz < r2 {
                        out.push(grid.idx(w(i), w(j), w(k)));
                    }
                }
            }
        }
        if out.len() < min {
            return Err(Error::BallTooSmall { nodes: out.len(), min });
        }
        out.sort_unstable();
        Ok(out)
    }
}

impl<T: Real> fmt::Display for Ball<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.covering {
            write!(f, "box")
        } else {
            write!(f, "B(({}, {}, {}), {})", self.center[0], self.center[1], self.center[2], self.radius)
        }
    }
}

/// Mean of `f` over the nodes of `ball`.
pub fn ball_average<T: Real>(f: &ScalarField<T>, ball: &Ball<T>) -> Result<T> {
    let nodes = ball.node_indices(f.grid())?;
    Ok(mean_over(f.data(), &nodes))
}

pub(crate) fn mean_over<T: Real>(data: &[T], nodes: &[usize]) -> T {
    nodes.iter().fold(T::zero(), |s, &i| s + data[i]) / T::from_usize_(nodes.len())
}

/// Radius list used by a strategy.
#[derive(Clone, Debug, PartialEq)]
pub enum Radii<T> {
    /// `h·2^k` for `k ≥ 1` while below `L`.
    Dyadic,
    Explicit(Vec<T>),
}

impl<T: Real> Radii<T> {
    pub fn resolve(&self, grid: &Grid3<T>) -> Result<Vec<T>> {
        match self {
            Radii::Dyadic => {
                let mut out = Vec::new();
                let mut r = grid.h() + grid.h();
                while r < grid.l() {
                    out.push(r);
                    r = r + r;
                }
                Ok(out)
            }
            Radii::Explicit(v) => {
                if let Some(bad) = v.iter().find(|&&r| !(r > T::zero() && r < grid.l())) {
                    return Err(Error::Config(format!("radius {bad} outside (0, L)")));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BallStrategy<T> {
    /// Every node as a center; rejected on grids finer than `max_n`.
    Exhaustive { max_n: usize, radii: Radii<T> },
    /// Centers on every `stride`-th node per axis.
    Dyadic { stride: usize, radii: Radii<T> },
}

impl<T: Real> BallStrategy<T> {
    pub fn exhaustive() -> Self {
        BallStrategy::Exhaustive { max_n: 32, radii: Radii::Dyadic }
    }

    pub fn dyadic(stride: usize) -> Self {
        BallStrategy::Dyadic { stride, radii: Radii::Dyadic }
    }
}

impl<T: Real> fmt::Display for BallStrategy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let radii = |r: &Radii<T>| match r {
            Radii::Dyadic => "dyadic".to_string(),
            Radii::Explicit(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
        };
        match self {
            BallStrategy::Exhaustive { radii: r, .. } => write!(f, "exhaustive[{}]", radii(r)),
            BallStrategy::Dyadic { stride, radii: r } => write!(f, "dyadic:{stride}[{}]", radii(r)),
        }
    }
}

impl<T: Real> std::str::FromStr for BallStrategy<T> {
    type Err = Error;

    /// `exhaustive` or `dyadic:<stride>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exhaustive" {
            return Ok(Self::exhaustive());
        }
        if let Some(k) = s.strip_prefix("dyadic:") {
            let stride = k.parse::<usize>().map_err(|_| Error::Config(format!("bad stride in {s:?}")))?;
            if stride == 0 {
                return Err(Error::Config("stride must be positive".into()));
            }
            return Ok(Self::dyadic(stride));
        }
        Err(Error::Config(format!("unknown ball strategy {s:?}; expected exhaustive or dyadic:<stride>")))
    }
}

/// A finite, ordered list of balls plus a description of how it was built.
#[derive(Clone, Debug, PartialEq)]
pub struct BallFamily<T> {
    pub balls: Vec<Ball<T>>,
    pub descriptor: String,
}

impl<T: Real> BallFamily<T> {
    pub fn new(balls: Vec<Ball<T>>, descriptor: impl Into<String>) -> Self {
        Self { balls, descriptor: descriptor.into() }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Appends the box-covering ball.
    pub fn with_covering(mut self, grid: &Grid3<T>) -> Self {
        self.balls.push(Ball::covering(grid));
        self.descriptor.push_str("+box");
        self
    }
}

/// Builds the ball list for `strategy`: centers in index order, radii ascending within each center.
pub fn sample_balls<T: Real>(grid: &Grid3<T>, strategy: &BallStrategy<T>) -> Result<BallFamily<T>> {
    let (stride, radii) = match strategy {
        BallStrategy::Exhaustive { max_n, radii } => {
            if grid.n() > *max_n {
                return Err(Error::Config(format!("exhaustive family limited to N <= {max_n}, got {}", grid.n())));
            }
            (1, radii)
        }
        BallStrategy::Dyadic { stride, radii } => {
            if *stride == 0 || grid.n() % stride != 0 {
                return Err(Error::Config(format!("stride {stride} must divide N = {}", grid.n())));
            }
            (*stride, radii)
        }
    };
    let radii = radii.resolve(grid)?;
    let m = grid.n() / stride;
    let mut balls = Vec::with_capacity(m * m * m * radii.len());
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let c = [grid.coord(i * stride), grid.coord(j * stride), grid.coord(k * stride)];
                for &r in &radii {
                    balls.push(Ball::new(c, r)?);
                }
            }
        }
    }
    Ok(BallFamily::new(balls, strategy.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting() {
        let g = Grid3::<f64>::new(8, 1.0).unwrap();
        let s = BallStrategy::Exhaustive { max_n: 8, radii: Radii::Explicit(vec![0.5, 0.6, 0.7, 0.8]) };
        assert_eq!(sample_balls(&g, &s).unwrap().len(), 2048);
        let g = Grid3::<f64>::new(32, 1.0).unwrap();
        let fam = sample_balls(&g, &BallStrategy::dyadic(4)).unwrap();
        let nr = Radii::<f64>::Dyadic.resolve(&g).unwrap().len();
        assert_eq!(fam.len(), 512 * nr);
        assert!(sample_balls(&g, &BallStrategy::exhaustive()).is_ok());
        let g = Grid3::<f64>::new(64, 1.0).unwrap();
        assert!(sample_balls(&g, &BallStrategy::exhaustive()).is_err());
    }

    #[test]
    fn dyadic_is_subset_of_exhaustive() {
        let g = Grid3::<f64>::new(16, 1.0).unwrap();
        let all = sample_balls(&g, &BallStrategy::exhaustive()).unwrap();
        let sub = sample_balls(&g, &BallStrategy::dyadic(2)).unwrap();
        assert!(sub.balls.iter().all(|b| all.balls.contains(b)));
        let same = sample_balls(&g, &BallStrategy::dyadic(1)).unwrap();
        assert_eq!(same.balls, all.balls);
    }

    #[test]
    fn membership_is_strict_and_periodic() {
        let g = Grid3::<f64>::new(16, 1.0).unwrap();
        let h = g.h();
        assert!(matches!(
            Ball::new([0.0; 3], h).unwrap().node_indices(&g),
            Err(Error::BallTooSmall { nodes: 1, min: 8 })
        ));
        assert_eq!(Ball::new([0.0; 3], 2.0 * h).unwrap().node_indices(&g).unwrap().len(), 27);
        // a ball at the corner wraps to all eight corners of the box
        let corner = Ball::new([-1.0; 3], 2.0 * h).unwrap().node_indices(&g).unwrap();
        assert_eq!(corner.len(), 27);
        assert!(corner.contains(&g.idx(15, 15, 15)));
        assert!(Ball::new([0.0; 3], 1.0).unwrap().node_indices(&g).is_err());
    }

    #[test]
    fn averages() {
        let g = Grid3::<f64>::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let c = ScalarField::constant(g, 3.25);
        let b = Ball::new([0.4, -1.0, 2.0], 1.5).unwrap();
        assert_eq!(ball_average(&c, &b).unwrap(), 3.25);
        let x = ScalarField::from_fn(g, |p| p[0]);
        let centered = Ball::new([g.coord(20), 0.0, 0.0], 1.5).unwrap();
        assert!((ball_average(&x, &centered).unwrap() - g.coord(20)).abs() < 1e-12);
        let r = 2.0;
        let q = ScalarField::from_fn(g, |p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        let avg = ball_average(&q, &Ball::new([0.0; 3], r).unwrap()).unwrap();
        let exact = 0.6 * r * r;
        assert!((avg - exact).abs() / exact <= 5.0 * g.h() / r, "{avg} vs {exact}");
        // shift invariance
        let shifted = x.map(|v| v + 7.0);
        let a = ball_average(&x, &b).unwrap();
        assert_eq!(ball_average(&shifted, &b).unwrap(), {
            let nodes = b.node_indices(&g).unwrap();
            mean_over(shifted.data(), &nodes)
        });
        assert!((ball_average(&shifted, &b).unwrap() - (a + 7.0)).abs() < 1e-12);
    }

    #[test]
    fn covering_ball() {
        let g = Grid3::<f64>::new(8, 1.0).unwrap();
        let b = Ball::covering(&g);
        assert_eq!(b.node_indices(&g).unwrap().len(), 512);
        assert!((b.measure(&g) - 8.0).abs() < 1e-12);
        let r = b.radius;
        assert!((4.0 / 3.0 * std::f64::consts::PI * r * r * r - 8.0).abs() < 1e-12);
    }
}
