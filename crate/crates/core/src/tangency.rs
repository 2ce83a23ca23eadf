//! Directed points, circles and tangency predicates in the plane.
//!
//! A directed point `(p, u)` is a position with a finite tangent slope. A
//! circle is tangent to it when it passes through `p` with tangent
//! direction `(1, u)`:
//!
//! ```text
//! (p_x - c_x)^2 + (p_y - c_y)^2 = r2      u (p_y - c_y) = c_x - p_x
//! ```
//!
//! Circles store the squared radius so every test stays rational.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::rational::serde_str;
use crate::kernel::{det3, int, Rational, Vec2, Vec3};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedPoint {
    pub p: Vec2,
    #[serde(with = "serde_str")]
    pub u: Rational,
}

impl DirectedPoint {
    pub fn new(p: Vec2, u: Rational) -> Self {
        Self { p, u }
    }

    /// Direction of the normal line through `p`.
    pub fn normal(&self) -> Vec2 {
        Vec2::new(-&self.u, Rational::one())
    }

    /// As a point of 3-space with the slope as third coordinate.
    pub fn as_space_point(&self) -> Vec3 {
        Vec3::new(self.p.x.clone(), self.p.y.clone(), self.u.clone())
    }

    pub fn tangent_line(&self) -> Line2 {
        // u x - y + (p_y - u p_x) = 0
        Line2::new(
            self.u.clone(),
            -Rational::one(),
            &self.p.y - &self.u * &self.p.x,
        )
        .expect("B = -1 is nonzero")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CircleRecord", into = "CircleRecord")]
pub struct Circle2 {
    center: Vec2,
    r2: Rational,
}

#[derive(Serialize, Deserialize)]
struct CircleRecord {
    c: Vec2,
    #[serde(with = "serde_str")]
    r2: Rational,
}

impl TryFrom<CircleRecord> for Circle2 {
    type Error = Error;
    fn try_from(r: CircleRecord) -> Result<Self> {
        Circle2::new(r.c, r.r2)
    }
}

impl From<Circle2> for CircleRecord {
    fn from(c: Circle2) -> Self {
        CircleRecord { c: c.center, r2: c.r2 }
    }
}

impl Circle2 {
    pub fn new(center: Vec2, r2: Rational) -> Result<Self> {
        if !r2.is_positive() {
            return Err(Error::NonPositiveRadius(r2));
        }
        Ok(Self { center, r2 })
    }

    /// Circle centred at `center` through the point `through`.
    pub fn through(center: Vec2, through: &Vec2) -> Result<Self> {
        let r2 = (through - &center).norm2();
        Self::new(center, r2)
    }

    pub fn center(&self) -> &Vec2 {
        &self.center
    }

    pub fn r2(&self) -> &Rational {
        &self.r2
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        (p - &self.center).norm2() == self.r2
    }

    /// Second intersection of the circle with the line of slope `s` through
    /// `known`, which must lie on the circle. Rational whenever the inputs
    /// are; sweeping `s` over the rationals reaches every rational point
    /// except `known` and the point on the vertical through it.
    pub fn point_from(&self, known: &Vec2, s: &Rational) -> Vec2 {
        let d = Vec2::new(Rational::one(), s.clone());
        let t = -(int(2) * (known - &self.center).dot(&d)) / d.norm2();
        known + &d.scale(&t)
    }
}

/// `A x + B y + C = 0` scaled to coprime integers with the first nonzero of
/// `(A, B)` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line2 {
    #[serde(with = "serde_str")]
    pub a: Rational,
    #[serde(with = "serde_str")]
    pub b: Rational,
    #[serde(with = "serde_str")]
    pub c: Rational,
}

impl Line2 {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::DegenerateLine);
        }
        let v = Vec3::new(a, b, c).primitive();
        Ok(Self {
            a: v.x,
            b: v.y,
            c: v.z,
        })
    }

    /// `y = slope * x + intercept`.
    pub fn from_slope(slope: &Rational, intercept: &Rational) -> Self {
        Self::new(slope.clone(), -Rational::one(), intercept.clone()).expect("B is nonzero")
    }

    pub fn eval(&self, p: &Vec2) -> Rational {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.eval(p).is_zero()
    }
}

pub fn is_tangent(dp: &DirectedPoint, c: &Circle2) -> bool {
    let dx = &dp.p.x - &c.center.x;
    let dy = &dp.p.y - &c.center.y;
    // u (p_y - c_y) = c_x - p_x  <=>  u dy + dx = 0
    (&dp.u * &dy + &dx).is_zero() && &dx * &dx + &dy * &dy == c.r2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FStatus {
    /// The two normal lines meet in a single foot point `w`.
    Regular,
    /// Equal slopes, distinct normal lines: no common centre.
    ParallelPerpendiculars,
    /// Equal slopes and the same normal line: the foot is not determined.
    CoincidentFoot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FEval {
    /// `(v - u) * (|pw|^2 - |qw|^2)` written as a polynomial in the six
    /// coordinates; well defined in every status.
    pub value: Rational,
    pub status: FStatus,
    /// Intersection of the two normal lines in the regular case.
    pub foot: Option<Vec2>,
}

/// Common-tangent-circle polynomial for two directed points.
pub fn eval_f(dp1: &DirectedPoint, dp2: &DirectedPoint) -> Result<FEval> {
    if dp1 == dp2 {
        return Err(Error::IdenticalDirectedPoints);
    }
    let (p, u) = (&dp1.p, &dp1.u);
    let (q, v) = (&dp2.p, &dp2.u);
    // normal lines: x + u y = c1, x + v y = c2
    let c1 = &p.x + u * &p.y;
    let c2 = &q.x + v * &q.y;
    let det = v - u;
    // scaled foot W = det * w
    let w_scaled = Vec2::new(&c1 * v - &c2 * u, &c2 - &c1);
    let diff = p - q;
    let value = &det * (p.norm2() - q.norm2()) - int(2) * w_scaled.dot(&diff);
    let (status, foot) = if !det.is_zero() {
        (FStatus::Regular, Some(w_scaled.scale(&det.recip())))
    } else if c1 == c2 {
        (FStatus::CoincidentFoot, None)
    } else {
        (FStatus::ParallelPerpendiculars, None)
    };
    Ok(FEval {
        value,
        status,
        foot,
    })
}

/// The unique circle tangent to both directed points, when the normal lines
/// meet in a foot equidistant from both positions and distinct from them.
/// Degenerate statuses yield `None`.
pub fn common_circle(dp1: &DirectedPoint, dp2: &DirectedPoint) -> Result<Option<Circle2>> {
    let f = eval_f(dp1, dp2)?;
    let Some(w) = f.foot else {
        return Ok(None);
    };
    if !f.value.is_zero() || w == dp1.p || w == dp2.p {
        return Ok(None);
    }
    let r2 = (&dp1.p - &w).norm2();
    Ok(Some(Circle2::new(w, r2)?))
}

/// Power of `w` with respect to `c`: `|w - center|^2 - r2`.
pub fn power(w: &Vec2, c: &Circle2) -> Rational {
    (w - &c.center).norm2() - &c.r2
}

/// Circle tangent to `dp` at `p` with power `rho` at `w`.
///
/// The centre is `p + s (-u, 1)` with
/// `s = (|w - p|^2 - rho) / (2 (w - p) . (-u, 1))`.
pub fn orthogonal_tangent_circle(
    dp: &DirectedPoint,
    w: &Vec2,
    rho: &Rational,
) -> Result<Option<Circle2>> {
    if *w == dp.p && !rho.is_positive() {
        return Err(Error::PowerPointAtTangency);
    }
    let n = dp.normal();
    let wp = w - &dp.p;
    let num = wp.norm2() - rho;
    let den = int(2) * wp.dot(&n);
    if den.is_zero() {
        // Either no solution (num != 0) or every normal parameter works.
        return Ok(None);
    }
    let s = num / den;
    let r2 = &s * &s * n.norm2();
    if !r2.is_positive() {
        return Ok(None);
    }
    let center = &dp.p + &n.scale(&s);
    Ok(Some(Circle2::new(center, r2)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineTangentCircles {
    /// Exact number of circles tangent to the directed point and the line.
    pub count: usize,
    /// The circles themselves, present only when all are rational.
    pub circles: Vec<Circle2>,
}

/// Circles tangent to `dp` at `p` and tangent to the line `l`.
///
/// With centre `p + s n`, `n = (-u, 1)`, tangency to `l` reads
/// `(L(p) + s k)^2 = s^2 |n|^2 (A^2 + B^2)` where `k = (A, B) . n`; nonzero
/// roots `s` are the circles.
pub fn circles_tangent_to_line(dp: &DirectedPoint, l: &Line2) -> Result<LineTangentCircles> {
    let n = dp.normal();
    let lp = l.eval(&dp.p);
    let k = &l.a * &n.x + &l.b * &n.y;
    let ab2 = &l.a * &l.a + &l.b * &l.b;
    let g = n.norm2() * ab2;
    // a s^2 + b s + c = 0
    let qa = &k * &k - &g;
    let qb = int(2) * &lp * &k;
    let qc = &lp * &lp;
    if qa.is_zero() && lp.is_zero() {
        return Err(Error::CoincidentTangentLines);
    }
    let mut roots = Vec::new();
    let mut count = 0;
    if qa.is_zero() {
        // l is parallel to the tangent line and misses p
        roots.push(-&qc / &qb);
        count = 1;
    } else if !lp.is_zero() {
        // discriminant 4 L(p)^2 g is strictly positive: two nonzero roots
        count = 2;
        if let Some(root) = rational_sqrt(&g) {
            let disc_root = int(2) * lp.abs() * root;
            for sgn in [-1, 1] {
                roots.push((-&qb + int(sgn) * &disc_root) / (int(2) * &qa));
            }
        }
    }
    // otherwise p lies on l away from the tangent line: only s = 0
    let circles = roots
        .into_iter()
        .map(|s| {
            let r2 = &s * &s * n.norm2();
            Circle2::new(&dp.p + &n.scale(&s), r2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LineTangentCircles { count, circles })
}

/// Exact square root of a nonnegative rational when it is rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Directed point tangent to `c` at the circle point `p`.
pub fn tangent_at(c: &Circle2, p: &Vec2) -> Result<DirectedPoint> {
    if !c.contains(p) {
        return Err(Error::NotOnCircle);
    }
    let dy = &p.y - &c.center.y;
    if dy.is_zero() {
        return Err(Error::VerticalTangent);
    }
    let u = -(&p.x - &c.center.x) / dy;
    Ok(DirectedPoint::new(p.clone(), u))
}

/// Random rational tangency point of a circle, given one rational point on
/// it. Returns `VerticalTangent` when the draw lands on a vertical tangent;
/// callers resample.
pub fn tangent_point_sample<R: Rng>(
    c: &Circle2,
    known: &Vec2,
    rng: &mut R,
    slope_bound: i64,
) -> Result<DirectedPoint> {
    if !c.contains(known) {
        return Err(Error::NotOnCircle);
    }
    let num = rng.gen_range(-slope_bound..=slope_bound);
    let den = rng.gen_range(1..=slope_bound.max(1));
    let p = c.point_from(known, &Rational::new(num.into(), den.into()));
    tangent_at(c, &p)
}

/// Exact collinearity of three planar points.
pub fn collinear(a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    let lift = |v: &Vec2| Vec3::new(v.x.clone(), v.y.clone(), Rational::one());
    det3(&lift(a), &lift(b), &lift(c)).is_zero()
}
