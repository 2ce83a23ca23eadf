//! Point-line duality in 3-space.
//!
//! A circle with centre `(cx, cy)` and squared radius `r2` maps to the point
//! `(cx, cy, r2 - cx^2 - cy^2)`. A directed point `(p, u)` maps to the line
//! cut out by
//!
//! ```text
//! zeta = -2 p1 xi - 2 p2 eta + p1^2 + p2^2      (xi - p1) + u (eta - p2) = 0
//! ```
//!
//! and tangency becomes incidence. A non-vertical plane
//! `a xi + b eta + zeta + d = 0` collects the circles w.r.t. which
//! `w = (a/2, b/2)` has power `rho = d + a^2/4 + b^2/4`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::rational::serde_str;
use crate::kernel::{int, rat, Rational, Vec2, Vec3};
use crate::tangency::{Circle2, DirectedPoint, Line2};

/// Dual point, serialized as `[xi, eta, zeta]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec3", into = "Vec3")]
pub struct DualPoint3 {
    pub xi: Rational,
    pub eta: Rational,
    pub zeta: Rational,
}

impl From<Vec3> for DualPoint3 {
    fn from(v: Vec3) -> Self {
        Self {
            xi: v.x,
            eta: v.y,
            zeta: v.z,
        }
    }
}

impl From<DualPoint3> for Vec3 {
    fn from(d: DualPoint3) -> Self {
        Vec3::new(d.xi, d.eta, d.zeta)
    }
}

impl DualPoint3 {
    pub fn to_vec(&self) -> Vec3 {
        Vec3::new(self.xi.clone(), self.eta.clone(), self.zeta.clone())
    }
}

/// Non-vertical plane `a xi + b eta + zeta + d = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerPlane {
    #[serde(with = "serde_str")]
    pub a: Rational,
    #[serde(with = "serde_str")]
    pub b: Rational,
    #[serde(with = "serde_str")]
    pub d: Rational,
}

impl PowerPlane {
    pub fn w(&self) -> Vec2 {
        let half = rat(1, 2);
        Vec2::new(&self.a * &half, &self.b * &half)
    }

    pub fn rho(&self) -> Rational {
        let quarter = rat(1, 4);
        &self.d + (&self.a * &self.a + &self.b * &self.b) * quarter
    }

    pub fn eval(&self, x: &Vec3) -> Rational {
        &self.a * &x.x + &self.b * &x.y + &x.z + &self.d
    }

    pub fn contains(&self, x: &DualPoint3) -> bool {
        self.eval(&x.to_vec()).is_zero()
    }

    /// Normal vector `(a, b, 1)`.
    pub fn normal(&self) -> Vec3 {
        Vec3::new(self.a.clone(), self.b.clone(), int(1))
    }
}

pub fn plane_to_power(a: Rational, b: Rational, d: Rational) -> PowerPlane {
    PowerPlane { a, b, d }
}

/// Plane of the circles w.r.t. which `w` has power `rho`.
pub fn encode_power(w: &Vec2, rho: &Rational) -> PowerPlane {
    PowerPlane {
        a: int(2) * &w.x,
        b: int(2) * &w.y,
        d: rho - w.norm2(),
    }
}

/// Either a power plane or a vertical plane `A xi + B eta + C = 0`, the
/// latter stored as a canonical [`Line2`] of the `(xi, eta)` plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DualPlane {
    Power(PowerPlane),
    Vertical(VerticalPlane),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "VerticalRecord", into = "VerticalRecord")]
pub struct VerticalPlane(pub Line2);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerticalRecord {
    vertical: Vec3,
}

impl TryFrom<VerticalRecord> for VerticalPlane {
    type Error = Error;
    fn try_from(r: VerticalRecord) -> Result<Self> {
        let v = r.vertical;
        Line2::new(v.x, v.y, v.z).map(VerticalPlane)
    }
}

impl From<VerticalPlane> for VerticalRecord {
    fn from(v: VerticalPlane) -> Self {
        VerticalRecord {
            vertical: Vec3::new(v.0.a, v.0.b, v.0.c),
        }
    }
}

impl VerticalPlane {
    pub fn contains(&self, x: &DualPoint3) -> bool {
        self.0.contains(&Vec2::new(x.xi.clone(), x.eta.clone()))
    }
}

/// Dual line of a directed point, kept as its source and the two planes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualLine3 {
    /// `zeta = -2 p1 xi - 2 p2 eta + |p|^2`, as a power plane.
    pub graph: PowerPlane,
    /// `(xi - p1) + u (eta - p2) = 0`.
    pub vertical: VerticalPlane,
    #[serde(skip)]
    source: Option<DirectedPoint>,
}

impl DualLine3 {
    pub fn contains(&self, x: &DualPoint3) -> bool {
        self.graph.contains(x) && self.vertical.contains(x)
    }

    pub fn source(&self) -> Option<&DirectedPoint> {
        self.source.as_ref()
    }
}

/// Point `(p1, p2, -|p|^2)` and direction `(-u, 1, 2 (p1 u - p2))` of the
/// dual line of `dp`.
pub fn dual_line_frame(dp: &DirectedPoint) -> (Vec3, Vec3) {
    let p = &dp.p;
    let base = Vec3::new(p.x.clone(), p.y.clone(), -p.norm2());
    let dir = Vec3::new(-&dp.u, int(1), int(2) * (&p.x * &dp.u - &p.y));
    (base, dir)
}

pub fn circle_dual(c: &Circle2) -> DualPoint3 {
    let ctr = c.center();
    DualPoint3 {
        xi: ctr.x.clone(),
        eta: ctr.y.clone(),
        zeta: c.r2() - ctr.norm2(),
    }
}

pub fn dp_dual_line(dp: &DirectedPoint) -> DualLine3 {
    let p = &dp.p;
    let graph = PowerPlane {
        a: int(2) * &p.x,
        b: int(2) * &p.y,
        d: -p.norm2(),
    };
    let vertical = Line2::new(int(1), dp.u.clone(), -(&p.x + &dp.u * &p.y))
        .expect("A = 1 is nonzero");
    DualLine3 {
        graph,
        vertical: VerticalPlane(vertical),
        source: Some(dp.clone()),
    }
}

pub fn dual_incidence(dp: &DirectedPoint, c: &Circle2) -> bool {
    dp_dual_line(dp).contains(&circle_dual(c))
}

pub fn dual_on_plane(c: &Circle2, pp: &PowerPlane) -> bool {
    pp.contains(&circle_dual(c))
}

/// Direct containment of the dual line of `dp` in `pp`.
pub fn line_in_plane(dp: &DirectedPoint, pp: &PowerPlane) -> bool {
    let (base, dir) = dual_line_frame(dp);
    pp.eval(&base).is_zero() && pp.normal().dot(&dir).is_zero()
}

/// The geometric form of [`line_in_plane`] for `rho > 0`: `p` on the circle
/// of radius `sqrt(rho)` about `w`, with `w - p` parallel to `(1, u)`.
pub fn line_in_plane_geometric(dp: &DirectedPoint, pp: &PowerPlane) -> bool {
    let w = pp.w();
    let wp = &w - &dp.p;
    wp.norm2() == pp.rho() && wp.cross(&Vec2::new(int(1), dp.u.clone())).is_zero()
}

pub fn line_in_vertical(dp: &DirectedPoint, v: &VerticalPlane) -> bool {
    dp_dual_line(dp).vertical == *v
}

pub fn line_in_dual_plane(dp: &DirectedPoint, plane: &DualPlane) -> bool {
    match plane {
        DualPlane::Power(pp) => line_in_plane(dp, pp),
        DualPlane::Vertical(v) => line_in_vertical(dp, v),
    }
}

/// A plane with the indices of the directed points whose dual lines it
/// contains, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichPlane {
    pub plane: DualPlane,
    pub members: Vec<usize>,
}

impl RichPlane {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// Plane spanned by two distinct coplanar dual lines, if they are coplanar.
fn span_plane(l1: &(Vec3, Vec3), l2: &(Vec3, Vec3)) -> Option<DualPlane> {
    let (p1, d1) = l1;
    let (p2, d2) = l2;
    let offset = p2 - p1;
    let cross = d1.cross(d2);
    let normal = if cross.is_zero() {
        d1.cross(&offset)
    } else {
        if !offset.dot(&cross).is_zero() {
            return None;
        }
        cross
    };
    if normal.is_zero() {
        // same line
        return None;
    }
    if normal.z.is_zero() {
        let c = -(&normal.x * &p1.x + &normal.y * &p1.y);
        let line = Line2::new(normal.x, normal.y, c).expect("horizontal normal is nonzero");
        return Some(DualPlane::Vertical(VerticalPlane(line)));
    }
    let a = &normal.x / &normal.z;
    let b = &normal.y / &normal.z;
    let d = -(normal.dot(p1) / &normal.z);
    Some(DualPlane::Power(PowerPlane { a, b, d }))
}

/// All planes containing at least `q` of the dual lines of `points`.
///
/// Non-vertical candidates come from coplanar pairs; vertical planes are
/// grouped directly since each dual line lies in exactly one of them.
/// Repeated directed points count once per occurrence. Output is sorted by
/// member count descending, then by plane.
pub fn rich_planes(points: &[DirectedPoint], q: usize) -> Result<Vec<RichPlane>> {
    if q < 2 {
        return Err(Error::BadRichThreshold(q));
    }
    let mut occurrences: BTreeMap<&DirectedPoint, Vec<usize>> = BTreeMap::new();
    for (i, dp) in points.iter().enumerate() {
        occurrences.entry(dp).or_default().push(i);
    }
    let distinct: Vec<&DirectedPoint> = occurrences.keys().copied().collect();
    let frames: Vec<(Vec3, Vec3)> = distinct.iter().map(|dp| dual_line_frame(dp)).collect();

    let mut candidates: BTreeMap<DualPlane, BTreeSet<usize>> = BTreeMap::new();
    for (i, dp) in distinct.iter().enumerate() {
        let v = dp_dual_line(dp).vertical;
        candidates.entry(DualPlane::Vertical(v)).or_default().insert(i);
    }
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            if let Some(plane @ DualPlane::Power(_)) = span_plane(&frames[i], &frames[j]) {
                let set = candidates.entry(plane).or_default();
                set.insert(i);
                set.insert(j);
            }
        }
    }

    let expand = |set: &BTreeSet<usize>| -> Vec<usize> {
        let mut m: Vec<usize> = set
            .iter()
            .flat_map(|&k| occurrences[distinct[k]].iter().copied())
            .collect();
        m.sort_unstable();
        m
    };
    let mut out: Vec<RichPlane> = candidates
        .into_iter()
        .map(|(plane, set)| RichPlane {
            members: expand(&set),
            plane,
        })
        .filter(|rp| rp.count() >= q)
        .collect();
    // re-check every member by direct containment
    out.par_iter().try_for_each(|rp| {
        if rp.members.iter().all(|&k| line_in_dual_plane(&points[k], &rp.plane)) {
            Ok(())
        } else {
            Err(())
        }
    })
    .expect("rich-plane member failed containment re-check");
    out.sort_by(|x, y| y.count().cmp(&x.count()).then_with(|| x.plane.cmp(&y.plane)));
    Ok(out)
}
