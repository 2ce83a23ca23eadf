//! Anchored unit circles in 3-space and lifted circles.
//!
//! An anchored circle has radius one and passes through the origin `o`, so
//! its centre lies on the unit sphere. It is stored as the centre `c` and a
//! primitive integer normal `n` of its plane; membership is
//! `|x - c|^2 = 1` and `n . x = 0`.
//!
//! The lifted image of a planar circle is the space curve of directed points
//! tangent to it, `(x, y, slope)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::rational::serde_str;
use crate::kernel::{int, RatFn, Rational, RationalCurve, TriPoly, UniPoly, Vec2, Vec3};
use crate::tangency::{is_tangent, rational_sqrt, tangent_at, Circle2, DirectedPoint};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "AnchoredRecord", into = "AnchoredRecord")]
pub struct AnchoredCircle {
    c: Vec3,
    n: Vec3,
}

#[derive(Serialize, Deserialize)]
struct AnchoredRecord {
    c: Vec3,
    n: Vec3,
}

impl TryFrom<AnchoredRecord> for AnchoredCircle {
    type Error = Error;
    fn try_from(r: AnchoredRecord) -> Result<Self> {
        AnchoredCircle::new(r.c, r.n)
    }
}

impl From<AnchoredCircle> for AnchoredRecord {
    fn from(g: AnchoredCircle) -> Self {
        AnchoredRecord { c: g.c, n: g.n }
    }
}

impl AnchoredCircle {
    /// Validates the invariants and normalizes the normal vector.
    pub fn new(c: Vec3, n: Vec3) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidAnchoredCircle("zero normal"));
        }
        if !c.norm2().is_one() {
            return Err(Error::InvalidAnchoredCircle("centre off the unit sphere"));
        }
        if !n.dot(&c).is_zero() {
            return Err(Error::InvalidAnchoredCircle("centre outside the circle plane"));
        }
        Ok(Self { c, n: n.primitive() })
    }

    pub fn center(&self) -> &Vec3 {
        &self.c
    }

    pub fn normal(&self) -> &Vec3 {
        &self.n
    }

    /// Rational point of the circle reached along direction `d` from the
    /// origin (`d` in the circle plane). Sweeping `d` over rational
    /// directions gives a dense set of rational points.
    pub fn point_along(&self, d: &Vec3) -> Vec3 {
        let t = int(2) * d.dot(&self.c) / d.norm2();
        d.scale(&t)
    }

    /// Rational basis of the plane directions.
    pub fn plane_basis(&self) -> (Vec3, Vec3) {
        (self.c.clone(), self.n.cross(&self.c))
    }
}

pub fn anchored_incident(p: &Vec3, g: &AnchoredCircle) -> bool {
    g.n.dot(p).is_zero() && (p - &g.c).norm2().is_one()
}

/// The anchored circle through `p` and `q`, if one exists.
///
/// The centre is the circumcentre `c = l p + m q` of `o, p, q`, found from
/// `2 c.p = |p|^2`, `2 c.q = |q|^2`; a circle exists iff `|c|^2 = 1`.
pub fn anchored_through_pair(p: &Vec3, q: &Vec3) -> Result<Option<AnchoredCircle>> {
    let n = p.cross(q);
    if p.is_zero() || q.is_zero() || n.is_zero() {
        return Err(Error::DegenerateTriple);
    }
    let (pp, pq, qq) = (p.norm2(), p.dot(q), q.norm2());
    let det = &pp * &qq - &pq * &pq;
    let half = Rational::new(1.into(), 2.into());
    let (rp, rq) = (&pp * &half, &qq * &half);
    let l = (&rp * &qq - &rq * &pq) / &det;
    let m = (&pp * &rq - &pq * &rp) / &det;
    let c = &p.scale(&l) + &q.scale(&m);
    if !c.norm2().is_one() {
        return Ok(None);
    }
    AnchoredCircle::new(c, n).map(Some)
}

/// Common points of two distinct anchored circles; always contains `o`.
pub fn anchored_intersection(g1: &AnchoredCircle, g2: &AnchoredCircle) -> Result<Vec<Vec3>> {
    if g1 == g2 {
        return Err(Error::IdenticalAnchoredCircles);
    }
    let axis = g1.n.cross(&g2.n);
    // Candidates lie on a line through o: the plane intersection, or the
    // perpendicular to c1 - c2 inside the common plane.
    let dir = if axis.is_zero() {
        g1.n.cross(&(&g1.c - &g2.c))
    } else {
        axis
    };
    let mut out = vec![Vec3::zero()];
    if !dir.is_zero() {
        let x = g1.point_along(&dir);
        if !x.is_zero() && anchored_incident(&x, g2) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Which stereographic projection the dual coordinates use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// Projection from the north pole `(0, 0, 1)`.
    North,
    /// Projection from the south pole; only used for the north pole itself.
    South,
}

/// Projective parameter, possibly at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectiveParam {
    Finite(#[serde(with = "serde_str")] Rational),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualAnchoredParams {
    pub chart: Chart,
    #[serde(with = "serde_str")]
    pub alpha: Rational,
    #[serde(with = "serde_str")]
    pub beta: Rational,
    /// Normal is `phi * e1 + e2` in the tangent basis (`e1` when infinite).
    pub phi: ProjectiveParam,
}

/// Deterministic tangent basis at a unit vector `c`: `e1 = c x k`,
/// `e2 = c x e1`, with `k = (0, 0, 1)` unless `c` is a pole, where
/// `k = (1, 0, 0)`.
pub fn tangent_basis(c: &Vec3) -> (Vec3, Vec3) {
    let axis = if c.x.is_zero() && c.y.is_zero() {
        Vec3::from_ints(1, 0, 0)
    } else {
        Vec3::from_ints(0, 0, 1)
    };
    let e1 = c.cross(&axis);
    let e2 = c.cross(&e1);
    (e1, e2)
}

/// Inverse stereographic projection onto the unit sphere.
pub fn sphere_point(chart: Chart, alpha: &Rational, beta: &Rational) -> Vec3 {
    let s = alpha * alpha + beta * beta;
    let den = &s + Rational::one();
    let z = match chart {
        Chart::North => &s - Rational::one(),
        Chart::South => Rational::one() - &s,
    };
    Vec3::new(int(2) * alpha / &den, int(2) * beta / &den, z / den)
}

pub fn to_params(g: &AnchoredCircle) -> DualAnchoredParams {
    let c = &g.c;
    let (chart, scale) = if c.z.is_one() {
        (Chart::South, (Rational::one() + &c.z).recip())
    } else {
        (Chart::North, (Rational::one() - &c.z).recip())
    };
    let (e1, e2) = tangent_basis(c);
    // n = a e1 + b e2 with e1 . e2 = 0
    let a = g.n.dot(&e1) / e1.norm2();
    let b = g.n.dot(&e2) / e2.norm2();
    let phi = if b.is_zero() {
        ProjectiveParam::Infinite
    } else {
        ProjectiveParam::Finite(a / b)
    };
    DualAnchoredParams {
        chart,
        alpha: &c.x * &scale,
        beta: &c.y * &scale,
        phi,
    }
}

pub fn from_params(d: &DualAnchoredParams) -> Result<AnchoredCircle> {
    let c = sphere_point(d.chart, &d.alpha, &d.beta);
    let (e1, e2) = tangent_basis(&c);
    let n = match &d.phi {
        ProjectiveParam::Finite(phi) => &e1.scale(phi) + &e2,
        ProjectiveParam::Infinite => e1,
    };
    AnchoredCircle::new(c, n)
}

/// Membership of a circle in the dual curve of `p`.
pub fn h_p_contains(p: &Vec3, g: &AnchoredCircle) -> bool {
    anchored_incident(p, g)
}

/// Up to `k` anchored circles through `p`.
///
/// For `|p| = 2` the centre is forced to `p / 2` and the samples rotate the
/// plane about `op`. For `|p| < 2` the centres range over the circle
/// `|c| = 1, c . p = |p|^2 / 2`, which needs one rational point `known` to
/// parameterize; the plane is then forced to contain `c` and `p`.
pub fn h_p_sample(p: &Vec3, known: Option<&Vec3>, k: usize) -> Result<Vec<AnchoredCircle>> {
    if p.is_zero() {
        return Err(Error::AnchorPointExcluded);
    }
    let four = int(4);
    let norm2 = p.norm2();
    if norm2 > four {
        return Ok(Vec::new());
    }
    let params = (0..k as i64).map(|i| if i % 2 == 0 { int(i / 2) } else { int(-(i + 1) / 2) });
    if norm2 == four {
        let c = p.scale(&Rational::new(1.into(), 2.into()));
        let (e1, e2) = tangent_basis(&c);
        return params
            .map(|phi| AnchoredCircle::new(c.clone(), &e1.scale(&phi) + &e2))
            .collect();
    }
    let c0 = known.ok_or(Error::InvalidAnchoredCircle("rational centre required"))?;
    if !c0.norm2().is_one() || !(p - c0).norm2().is_one() {
        return Err(Error::InvalidAnchoredCircle("known centre not at unit distance from o and p"));
    }
    let f1 = p.cross(c0);
    let f2 = p.cross(&f1);
    params
        .map(|s| {
            let d = &f1 + &f2.scale(&s);
            let t = -(int(2) * c0.dot(&d)) / d.norm2();
            let c = c0 + &d.scale(&t);
            AnchoredCircle::new(c.clone(), c.cross(p))
        })
        .collect()
}

/// Lifted image of a planar circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftedCircle {
    pub base: Circle2,
}

impl LiftedCircle {
    pub fn new(base: Circle2) -> Self {
        Self { base }
    }
}

/// Both lifted-circle equations `(x-cx)^2 + (y-cy)^2 = r2` and
/// `z (y - cy) = cx - x`.
pub fn lifted_contains(lc: &LiftedCircle, pt: &Vec3) -> bool {
    let c = lc.base.center();
    let dx = &pt.x - &c.x;
    let dy = &pt.y - &c.y;
    (&pt.z * &dy + &dx).is_zero() && &dx * &dx + &dy * &dy == *lc.base.r2()
}

/// Rational parameterization of a lifted circle from a known rational point
/// of the base circle: `(x, y)` runs over the second intersection of the
/// line of slope `s` through `known`, and `z = (cx - x) / (y - cy)`.
pub fn lifted_param(lc: &LiftedCircle, known: &Vec2) -> Result<RationalCurve> {
    let base = &lc.base;
    if !base.contains(known) {
        return Err(Error::NotOnCircle);
    }
    let c = base.center();
    let s = UniPoly::identity();
    let den = UniPoly::from_ints(&[1, 0, 1]);
    // t(s) = -2 ((k - c) . (1, s)) / (1 + s^2)
    let kc = known - c;
    let t_num = UniPoly::new(vec![int(-2) * &kc.x, int(-2) * &kc.y]);
    let x_num = &den.scale(&known.x) + &t_num;
    let y_num = &den.scale(&known.y) + &(&t_num * &s);
    let z_num = &den.scale(&c.x) - &x_num;
    let z_den = &y_num - &den.scale(&c.y);
    Ok(RationalCurve::new(
        RatFn::new(x_num, den.clone()),
        RatFn::new(y_num, den),
        RatFn::new(z_num, z_den),
    ))
}

/// Common points of two lifted circles: the directed points tangent to both
/// base circles. These sit on the line of centres, so there are at most two.
pub fn lifted_intersection(l1: &LiftedCircle, l2: &LiftedCircle) -> Result<Vec<Vec3>> {
    if l1 == l2 {
        return Err(Error::IdenticalCircles);
    }
    let (c1, c2) = (l1.base.center(), l2.base.center());
    let axis = c2 - c1;
    let dist2 = axis.norm2();
    if dist2.is_zero() {
        return Ok(Vec::new());
    }
    let Some(t) = rational_sqrt(&(l1.base.r2() / &dist2)) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for t in [t.clone(), -t] {
        let p = c1 + &axis.scale(&t);
        if !l2.base.contains(&p) {
            continue;
        }
        if let Ok(dp) = tangent_at(&l1.base, &p) {
            if is_tangent(&dp, &l2.base) {
                out.push(dp.as_space_point());
            }
        }
    }
    Ok(out)
}

/// Union of the lifted images of all circles tangent to `dp0`:
/// `(z + z0)((y - y0)^2 - (x - x0)^2) - 2 (x - x0)(y - y0)(z z0 - 1)`.
pub fn cubic_surface(dp0: &DirectedPoint) -> TriPoly {
    let c = |q: &Rational| TriPoly::constant(q.clone());
    let (x0, y0, z0) = (&dp0.p.x, &dp0.p.y, &dp0.u);
    let dx = &TriPoly::var(0) - &c(x0);
    let dy = &TriPoly::var(1) - &c(y0);
    let z = TriPoly::var(2);
    let first = &(&z + &c(z0)) * &(&(&dy * &dy) - &(&dx * &dx));
    let zz0_minus_one = &z.scale(z0) - &TriPoly::one();
    let second = &(&(&dx * &dy) * &zz0_minus_one).scale(&int(2));
    &first - second
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;

    fn xy_unit() -> AnchoredCircle {
        AnchoredCircle::new(Vec3::from_ints(1, 0, 0), Vec3::from_ints(0, 0, 1)).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let g = xy_unit();
        assert!(anchored_incident(&Vec3::from_ints(2, 0, 0), &g));
        assert!(anchored_incident(&Vec3::zero(), &g));
        assert!(!anchored_incident(&Vec3::from_ints(1, 1, 1), &g));
    }

    #[test]
    fn invariant_checks() {
        assert!(AnchoredCircle::new(Vec3::from_ints(1, 0, 0), Vec3::from_ints(1, 0, 0)).is_err());
        assert!(AnchoredCircle::new(Vec3::from_ints(2, 0, 0), Vec3::from_ints(0, 0, 1)).is_err());
        let g = AnchoredCircle::new(Vec3::from_ints(1, 0, 0), Vec3::from_ints(0, 0, -4)).unwrap();
        assert_eq!(g.normal(), &Vec3::from_ints(0, 0, 1));
    }

    #[test]
    fn through_pair_examples() {
        let g = anchored_through_pair(&Vec3::from_ints(2, 0, 0), &Vec3::from_ints(1, 1, 0))
            .unwrap()
            .unwrap();
        assert_eq!(g, xy_unit());
        assert_eq!(
            anchored_through_pair(&Vec3::from_ints(2, 0, 0), &Vec3::from_ints(0, 0, 3)).unwrap(),
            None
        );
        let p = Vec3::from_ints(2, 0, 0);
        assert_eq!(anchored_through_pair(&p, &p), Err(Error::DegenerateTriple));
        assert_eq!(
            anchored_through_pair(&p, &Vec3::from_ints(-1, 0, 0)),
            Err(Error::DegenerateTriple)
        );
    }

    #[test]
    fn dual_params_examples() {
        let d = to_params(&xy_unit());
        assert_eq!(d.chart, Chart::North);
        assert_eq!((d.alpha.clone(), d.beta.clone()), (int(1), int(0)));
        assert_eq!(d.phi, ProjectiveParam::Finite(int(0)));
        assert_eq!(from_params(&d).unwrap(), xy_unit());

        let pole = AnchoredCircle::new(Vec3::from_ints(0, 0, 1), Vec3::from_ints(0, 1, 0)).unwrap();
        let d = to_params(&pole);
        assert_eq!(d.chart, Chart::South);
        assert_eq!(from_params(&d).unwrap(), pole);

        let south = AnchoredCircle::new(Vec3::from_ints(0, 0, -1), Vec3::from_ints(1, 1, 0)).unwrap();
        assert_eq!(from_params(&to_params(&south)).unwrap(), south);
    }

    #[test]
    fn stereographic_round_trip() {
        let c = sphere_point(Chart::North, &rat(1, 3), &rat(-2, 5));
        assert!(c.norm2().is_one());
        let g = AnchoredCircle::new(c.clone(), c.cross(&Vec3::from_ints(1, 2, 3))).unwrap();
        let d = to_params(&g);
        assert_eq!((d.alpha.clone(), d.beta.clone()), (rat(1, 3), rat(-2, 5)));
        assert_eq!(from_params(&d).unwrap(), g);
    }

    #[test]
    fn h_p_examples() {
        let p = Vec3::from_ints(1, 1, 0);
        let samples = h_p_sample(&p, Some(&Vec3::from_ints(1, 0, 0)), 6).unwrap();
        assert_eq!(samples.len(), 6);
        let centers: Vec<&Vec3> = samples.iter().map(|g| g.center()).collect();
        assert!(centers.contains(&&Vec3::from_ints(1, 0, 0)));
        for g in &samples {
            assert!(h_p_contains(&p, g));
            assert_eq!(&g.center().x + &g.center().y, int(1));
        }
        let other = AnchoredCircle::new(Vec3::from_ints(0, 1, 0), Vec3::from_ints(0, 1, 0).cross(&p)).unwrap();
        assert!(h_p_contains(&p, &other));

        let far = Vec3::from_ints(2, 0, 0);
        let samples = h_p_sample(&far, None, 5).unwrap();
        assert_eq!(samples.len(), 5);
        for g in &samples {
            assert_eq!(g.center(), &Vec3::from_ints(1, 0, 0));
            assert!(anchored_incident(&far, g));
        }

        assert!(h_p_sample(&Vec3::from_ints(3, 0, 0), None, 4).unwrap().is_empty());
        assert_eq!(h_p_sample(&Vec3::zero(), None, 4), Err(Error::AnchorPointExcluded));
    }

    #[test]
    fn pair_intersection() {
        let g1 = xy_unit();
        let g2 = AnchoredCircle::new(Vec3::from_ints(0, 1, 0), Vec3::from_ints(0, 0, 1)).unwrap();
        let pts = anchored_intersection(&g1, &g2).unwrap();
        assert_eq!(pts, vec![Vec3::zero(), Vec3::from_ints(1, 1, 0)]);
        let g3 = AnchoredCircle::new(Vec3::from_ints(1, 0, 0), Vec3::from_ints(0, 1, 0)).unwrap();
        let pts = anchored_intersection(&g1, &g3).unwrap();
        assert_eq!(pts, vec![Vec3::zero(), Vec3::from_ints(2, 0, 0)]);
        assert_eq!(anchored_intersection(&g1, &g1), Err(Error::IdenticalAnchoredCircles));
    }

    fn lift(x: i64, y: i64, r2: i64) -> LiftedCircle {
        LiftedCircle::new(Circle2::new(Vec2::from_ints(x, y), int(r2)).unwrap())
    }

    #[test]
    fn lifted_membership() {
        let unit = lift(0, 0, 1);
        assert!(lifted_contains(&unit, &Vec3::from_ints(0, 1, 0)));
        for z in -3..=3 {
            assert!(!lifted_contains(&unit, &Vec3::from_ints(1, 0, z)));
        }
        assert!(lifted_contains(&lift(0, 5, 25), &Vec3::new(int(3), int(1), rat(3, 4))));
    }

    #[test]
    fn lifted_parameterization() {
        let unit = lift(0, 0, 1);
        let curve = lifted_param(&unit, &Vec2::from_ints(-1, 0)).unwrap();
        assert_eq!(curve.x.num, UniPoly::from_ints(&[1, 0, -1]));
        assert_eq!(curve.y.num, UniPoly::from_ints(&[0, 2]));
        // s = 0 is (1, 0): vertical tangent, no finite slope
        assert_eq!(curve.point_at(&int(0)), None);
        assert_eq!(curve.point_at(&int(1)), Some(Vec3::from_ints(0, 1, 0)));
        for k in -6..=6 {
            if let Some(pt) = curve.point_at(&rat(k, 3)) {
                assert!(lifted_contains(&unit, &pt));
            }
        }
    }

    #[test]
    fn lifted_pairs() {
        // internally tangent at (2, 0): vertical tangent, no common lift point
        assert!(lifted_intersection(&lift(0, 0, 4), &lift(1, 0, 1)).unwrap().is_empty());
        // tangent at (0, 2) with horizontal direction
        let pts = lifted_intersection(&lift(0, 0, 4), &lift(0, 1, 1)).unwrap();
        assert_eq!(pts, vec![Vec3::from_ints(0, 2, 0)]);
        // crossing circles share no directed point
        assert!(lifted_intersection(&lift(0, 0, 4), &lift(1, 1, 4)).unwrap().is_empty());
        assert!(lifted_intersection(&lift(0, 0, 4), &lift(0, 0, 1)).unwrap().is_empty());
        assert_eq!(
            lifted_intersection(&lift(0, 0, 4), &lift(0, 0, 4)),
            Err(Error::IdenticalCircles)
        );
    }

    #[test]
    fn cubic_examples() {
        let origin = DirectedPoint::new(Vec2::zero(), int(0));
        let f = cubic_surface(&origin);
        // z (y^2 - x^2) + 2 x y
        let (x, y, z) = (TriPoly::var(0), TriPoly::var(1), TriPoly::var(2));
        let expected = &(&z * &(&(&y * &y) - &(&x * &x))) + &(&x * &y).scale(&int(2));
        assert_eq!(f, expected);
        assert!(f.eval(&[int(0), int(0), int(0)]).is_zero());
        assert!(f.eval(&[int(3), int(1), rat(3, 4)]).is_zero());
        let dp0 = DirectedPoint::new(Vec2::new(rat(1, 2), int(-3)), rat(2, 7));
        let g = cubic_surface(&dp0);
        assert_eq!(g.total_degree(), 3);
        assert!(g.eval(&[rat(1, 2), int(-3), rat(2, 7)]).is_zero());
    }

    #[test]
    fn anchored_json() {
        let s = serde_json::to_string(&xy_unit()).unwrap();
        assert_eq!(s, r#"{"c":["1","0","0"],"n":["0","0","1"]}"#);
        assert_eq!(serde_json::from_str::<AnchoredCircle>(&s).unwrap(), xy_unit());
        let bad = r#"{"c":["1","1","0"],"n":["0","0","1"]}"#;
        assert!(serde_json::from_str::<AnchoredCircle>(bad).is_err());
    }
}
