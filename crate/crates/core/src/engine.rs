//! Exact incidence counting with an optional floating-point prefilter.
//!
//! Every supported incidence relation is a conjunction of linear equations
//! in a lifted feature vector of the point: tangency of `(p, u)` to a circle
//! is linear in `(x, y, u, u y, x^2 + y^2, 1)`, anchored incidence in
//! `(x, y, z, |p|^2, 1)`, and so on. Features and forms are cleared to
//! integers once, so the per-pair test is a few integer dot products, done in
//! `i128` when the entries are small and in big integers otherwise.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anchored::{AnchoredCircle, LiftedCircle};
use crate::dual::{DualLine3, DualPoint3};
use crate::error::{Error, Result};
use crate::kernel::rational::{common_denominator, serde_str};
use crate::kernel::{int, Rational, Vec3};
use crate::tangency::{Circle2, DirectedPoint};

/// The line `x = t, y = a t + b, z = c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HorizontalLine {
    #[serde(with = "serde_str")]
    pub a: Rational,
    #[serde(with = "serde_str")]
    pub b: Rational,
    #[serde(with = "serde_str")]
    pub c: Rational,
}

impl HorizontalLine {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Self { a, b, c }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        p.z == self.c && p.y == &self.a * &p.x + &self.b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "kebab-case")]
pub enum PointSet {
    Directed(Vec<DirectedPoint>),
    Space(Vec<Vec3>),
    Dual(Vec<DualPoint3>),
}

impl PointSet {
    pub fn len(&self) -> usize {
        match self {
            PointSet::Directed(v) => v.len(),
            PointSet::Space(v) => v.len(),
            PointSet::Dual(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> &'static str {
        match self {
            PointSet::Directed(_) => "directed",
            PointSet::Space(_) => "space",
            PointSet::Dual(_) => "dual",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "kebab-case")]
pub enum CurveSet {
    Circles(Vec<Circle2>),
    Lifted(Vec<LiftedCircle>),
    Anchored(Vec<AnchoredCircle>),
    HorizontalLines(Vec<HorizontalLine>),
    DualLines(Vec<DualLine3>),
}

impl CurveSet {
    pub fn len(&self) -> usize {
        match self {
            CurveSet::Circles(v) => v.len(),
            CurveSet::Lifted(v) => v.len(),
            CurveSet::Anchored(v) => v.len(),
            CurveSet::HorizontalLines(v) => v.len(),
            CurveSet::DualLines(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> &'static str {
        match self {
            CurveSet::Circles(_) => "circles",
            CurveSet::Lifted(_) => "lifted",
            CurveSet::Anchored(_) => "anchored",
            CurveSet::HorizontalLines(_) => "horizontal-lines",
            CurveSet::DualLines(_) => "dual-lines",
        }
    }
}

/// A point set with a curve family of matching kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub points: PointSet,
    pub curves: CurveSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Prefilter,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Prefilter => "prefilter",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub mode: Mode,
    /// Multiplier on the certified residual bound; must be at least 1.
    pub slack: f64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            slack: 4.0,
            threads: None,
        }
    }
}

impl CountOptions {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn prefilter() -> Self {
        Self {
            mode: Mode::Prefilter,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceReport {
    pub m: usize,
    pub n: usize,
    pub total: u64,
    pub mode: Mode,
    pub seconds: f64,
    /// Pairs evaluated with the exact predicate.
    pub exact_checks: u64,
    pub per_point: Vec<u32>,
    pub per_curve: Vec<u32>,
}

impl IncidenceReport {
    pub fn histograms_consistent(&self) -> bool {
        let a: u64 = self.per_point.iter().map(|&c| c as u64).sum();
        let b: u64 = self.per_curve.iter().map(|&c| c as u64).sum();
        a == self.total && b == self.total
    }

    /// Same report with the timing field zeroed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self {
            seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self, histograms: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !histograms {
            let obj = v.as_object_mut().expect("report is an object");
            obj.remove("per_point");
            obj.remove("per_curve");
        }
        v
    }

    pub const CSV_HEADER: [&'static str; 5] = ["m", "n", "total", "mode", "seconds"];

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.m.to_string(),
            self.n.to_string(),
            self.total.to_string(),
            self.mode.as_str().to_string(),
            format!("{:.6}", self.seconds),
        ]
    }
}

/// Integer vector with an `i64` copy when every entry is at most `2^60`.
#[derive(Clone, Debug)]
struct IntRow {
    small: Option<Vec<i64>>,
    big: Vec<BigInt>,
    float: Vec<f64>,
}

const SMALL_LIMIT: i64 = 1 << 60;

impl IntRow {
    fn from_rationals(v: &[Rational]) -> Self {
        let den = common_denominator(v.iter());
        let big: Vec<BigInt> = v.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        let small: Option<Vec<i64>> = big
            .iter()
            .map(|x| x.to_i64().filter(|y| y.abs() <= SMALL_LIMIT))
            .collect();
        let float = big
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        Self { small, big, float }
    }

    fn dot_is_zero(&self, o: &IntRow) -> bool {
        if let (Some(a), Some(b)) = (&self.small, &o.small) {
            // |sum| <= 8 * 2^120 for the at most 6 entries used here
            let s: i128 = a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum();
            return s == 0;
        }
        let s: BigInt = self.big.iter().zip(&o.big).map(|(x, y)| x * y).sum();
        s.is_zero()
    }
}

/// The feature vectors and per-curve linear forms of an instance.
struct Encoded {
    features: Vec<IntRow>,
    forms: Vec<Vec<IntRow>>,
}

fn r(v: &Rational) -> Rational {
    v.clone()
}

fn tangency_features(x: &Rational, y: &Rational, u: &Rational) -> Vec<Rational> {
    vec![r(x), r(y), r(u), u * y, x * x + y * y, int(1)]
}

fn circle_forms(c: &Circle2) -> Vec<Vec<Rational>> {
    let ctr = c.center();
    let zero = int(0);
    vec![
        // u (y - cy) + (x - cx)
        vec![int(1), r(&zero), -&ctr.y, int(1), r(&zero), -&ctr.x],
        // |p|^2 - 2 p.c + |c|^2 - r2
        vec![int(-2) * &ctr.x, int(-2) * &ctr.y, r(&zero), r(&zero), int(1), ctr.norm2() - c.r2()],
    ]
}

fn encode(inst: &Instance) -> Result<Encoded> {
    let rows = |v: Vec<Vec<Rational>>| v.iter().map(|f| IntRow::from_rationals(f)).collect::<Vec<_>>();
    let (features, forms): (Vec<Vec<Rational>>, Vec<Vec<Vec<Rational>>>) =
        match (&inst.points, &inst.curves) {
            (PointSet::Directed(ps), CurveSet::Circles(cs)) => (
                ps.iter().map(|d| tangency_features(&d.p.x, &d.p.y, &d.u)).collect(),
                cs.iter().map(circle_forms).collect(),
            ),
            (PointSet::Space(ps), CurveSet::Lifted(cs)) => (
                ps.iter().map(|p| tangency_features(&p.x, &p.y, &p.z)).collect(),
                cs.iter().map(|l| circle_forms(&l.base)).collect(),
            ),
            (PointSet::Space(ps), CurveSet::Anchored(gs)) => (
                ps.iter().map(|p| vec![r(&p.x), r(&p.y), r(&p.z), p.norm2(), int(1)]).collect(),
                gs.iter()
                    .map(|g| {
                        let (c, n) = (g.center(), g.normal());
                        vec![
                            vec![r(&n.x), r(&n.y), r(&n.z), int(0), int(0)],
                            vec![int(-2) * &c.x, int(-2) * &c.y, int(-2) * &c.z, int(1), int(0)],
                        ]
                    })
                    .collect(),
            ),
            (PointSet::Space(ps), CurveSet::HorizontalLines(ls)) => (
                ps.iter().map(|p| vec![r(&p.x), r(&p.y), r(&p.z), int(1)]).collect(),
                ls.iter()
                    .map(|l| {
                        vec![
                            vec![int(0), int(0), int(1), -&l.c],
                            vec![-&l.a, int(1), int(0), -&l.b],
                        ]
                    })
                    .collect(),
            ),
            (PointSet::Dual(ps), CurveSet::DualLines(ls)) => (
                ps.iter().map(|p| vec![r(&p.xi), r(&p.eta), r(&p.zeta), int(1)]).collect(),
                ls.iter()
                    .map(|l| {
                        let (g, v) = (&l.graph, &l.vertical.0);
                        vec![
                            vec![r(&g.a), r(&g.b), int(1), r(&g.d)],
                            vec![r(&v.a), r(&v.b), int(0), r(&v.c)],
                        ]
                    })
                    .collect(),
            ),
            (p, c) => {
                return Err(Error::MixedKinds {
                    points: p.kind(),
                    curves: c.kind(),
                })
            }
        };
    Ok(Encoded {
        features: rows(features),
        forms: forms.into_iter().map(rows).collect(),
    })
}

const TILE: usize = 128;

/// Unit roundoff of `f64`.
const UNIT: f64 = f64::EPSILON / 2.0;

/// Floating-point screen: `false` only when some residual is certainly
/// nonzero. The float dot product of `k <= 6` terms, including the rounding
/// of the integer inputs, has error at most `(k + 2) u sum |f_i g_i|`; the
/// threshold is `16 u` times that magnitude times `slack >= 1`.
fn may_be_incident(point: &IntRow, forms: &[IntRow], slack: f64) -> bool {
    for f in forms {
        let mut s = 0.0;
        let mut mag = 0.0;
        for (a, b) in point.float.iter().zip(&f.float) {
            let t = a * b;
            s += t;
            mag += t.abs();
        }
        if !(s.is_finite() && mag.is_finite()) {
            return true;
        }
        if s.abs() > slack * 16.0 * UNIT * mag {
            return false;
        }
    }
    true
}

struct TileResult {
    per_point: Vec<u32>,
    hits: Vec<u32>,
    exact_checks: u64,
}

fn run_tile(enc: &Encoded, rows: std::ops::Range<usize>, opts: &CountOptions) -> TileResult {
    let mut per_point = vec![0u32; rows.len()];
    let mut hits = Vec::new();
    let mut exact_checks = 0;
    for cols in (0..enc.forms.len()).step_by(TILE) {
        let col_end = (cols + TILE).min(enc.forms.len());
        for (slot, i) in rows.clone().enumerate() {
            let pt = &enc.features[i];
            for j in cols..col_end {
                let forms = &enc.forms[j];
                if opts.mode == Mode::Prefilter && !may_be_incident(pt, forms, opts.slack) {
                    continue;
                }
                exact_checks += 1;
                if forms.iter().all(|f| pt.dot_is_zero(f)) {
                    per_point[slot] += 1;
                    hits.push(j as u32);
                }
            }
        }
    }
    TileResult {
        per_point,
        hits,
        exact_checks,
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Counts all incidences of the instance.
pub fn count(inst: &Instance, opts: &CountOptions) -> Result<IncidenceReport> {
    if !(opts.slack.is_finite() && opts.slack >= 1.0) {
        return Err(Error::BadPrefilterSlack(opts.slack));
    }
    let start = Instant::now();
    let enc = encode(inst)?;
    let (m, n) = (enc.features.len(), enc.forms.len());
    let tiles: Vec<TileResult> = with_threads(opts.threads, || {
        (0..m.div_ceil(TILE))
            .into_par_iter()
            .map(|t| run_tile(&enc, t * TILE..((t + 1) * TILE).min(m), opts))
            .collect()
    });
    let mut per_point = Vec::with_capacity(m);
    let mut per_curve = vec![0u32; n];
    let mut exact_checks = 0;
    for t in tiles {
        per_point.extend(t.per_point);
        for j in t.hits {
            per_curve[j as usize] += 1;
        }
        exact_checks += t.exact_checks;
    }
    let total = per_point.iter().map(|&c| c as u64).sum();
    Ok(IncidenceReport {
        m,
        n,
        total,
        mode: opts.mode,
        seconds: start.elapsed().as_secs_f64(),
        exact_checks,
        per_point,
        per_curve,
    })
}

/// Exact incidence of one pair, by the same encoding as [`count`].
pub fn incident(inst: &Instance, point: usize, curve: usize) -> Result<bool> {
    let enc = encode(inst)?;
    Ok(enc.forms[curve].iter().all(|f| enc.features[point].dot_is_zero(f)))
}

/// Number of the given `(point, curve)` pairs that are incident, checked
/// exactly in parallel.
pub fn count_pairs(inst: &Instance, pairs: &[(usize, usize)]) -> Result<usize> {
    let enc = encode(inst)?;
    Ok(pairs
        .par_iter()
        .filter(|&&(i, j)| enc.forms[j].iter().all(|f| enc.features[i].dot_is_zero(f)))
        .count())
}

/// Indices of the points incident to at least `t` curves.
pub fn t_rich_points(inst: &Instance, t: usize, opts: &CountOptions) -> Result<Vec<usize>> {
    if t == 0 {
        return Err(Error::BadPointThreshold);
    }
    let report = count(inst, opts)?;
    Ok(rich_from_report(&report, t))
}

pub fn rich_from_report(report: &IncidenceReport, t: usize) -> Vec<usize> {
    report
        .per_point
        .iter()
        .enumerate()
        .filter(|(_, &c)| c as usize >= t)
        .map(|(i, _)| i)
        .collect()
}

/// `total / (m^(3/5) n^(3/5) + m + n)`; zero for an empty instance.
pub fn bound_ratio(report: &IncidenceReport) -> f64 {
    let (m, n) = (report.m as f64, report.n as f64);
    let shape = (m * n).powf(0.6) + m + n;
    if shape == 0.0 {
        0.0
    } else {
        report.total as f64 / shape
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

/// Least-squares fit of `log total` against `log sqrt(m n)`; for `m = n`
/// families the slope is the growth exponent in `m`.
pub fn exponent_fit(series: &[(usize, usize, u64)]) -> Result<ExponentFit> {
    if series.len() < 3 {
        return Err(Error::DegenerateSeries("fewer than 3 points"));
    }
    if series.iter().any(|&(m, n, t)| t == 0 || m == 0 || n == 0) {
        return Err(Error::DegenerateSeries("zero entry"));
    }
    let xs: Vec<f64> = series.iter().map(|&(m, n, _)| 0.5 * ((m as f64).ln() + (n as f64).ln())).collect();
    let ys: Vec<f64> = series.iter().map(|&(_, _, t)| (t as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-12 {
        return Err(Error::DegenerateSeries("constant scale"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (rss / k).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchored::{anchored_incident, lifted_contains};
    use crate::dual::{circle_dual, dp_dual_line};
    use crate::kernel::{rat, Vec2};
    use crate::tangency::is_tangent;

    fn circle(x: i64, y: i64, r2: i64) -> Circle2 {
        Circle2::new(Vec2::from_ints(x, y), int(r2)).unwrap()
    }

    fn tangency_instance() -> (Vec<DirectedPoint>, Vec<Circle2>) {
        let pts = vec![
            DirectedPoint::new(Vec2::zero(), int(0)),
            DirectedPoint::new(Vec2::from_ints(3, 1), rat(3, 4)),
            DirectedPoint::new(Vec2::from_ints(0, 1), int(0)),
            DirectedPoint::new(Vec2::from_ints(0, 1), int(1)),
        ];
        let circles = vec![circle(0, 5, 25), circle(0, 0, 1), circle(0, -1, 1), circle(7, 7, 2)];
        (pts, circles)
    }

    #[test]
    fn tangency_matches_predicate() {
        let (pts, circles) = tangency_instance();
        let inst = Instance {
            points: PointSet::Directed(pts.clone()),
            curves: CurveSet::Circles(circles.clone()),
        };
        for mode in [CountOptions::exact(), CountOptions::prefilter()] {
            let rep = count(&inst, &mode).unwrap();
            let mut expected = 0;
            for (i, p) in pts.iter().enumerate() {
                let k = circles.iter().filter(|c| is_tangent(p, c)).count();
                assert_eq!(rep.per_point[i] as usize, k);
                expected += k as u64;
            }
            assert_eq!(rep.total, expected);
            assert!(rep.histograms_consistent());
        }
    }

    #[test]
    fn other_kinds_match_predicates() {
        let (pts, circles) = tangency_instance();
        let space: Vec<Vec3> = pts.iter().map(|d| d.as_space_point()).collect();
        let lifted: Vec<LiftedCircle> = circles.iter().cloned().map(LiftedCircle::new).collect();
        let inst = Instance {
            points: PointSet::Space(space.clone()),
            curves: CurveSet::Lifted(lifted.clone()),
        };
        let rep = count(&inst, &CountOptions::exact()).unwrap();
        let brute: usize = space
            .iter()
            .map(|p| lifted.iter().filter(|l| lifted_contains(l, p)).count())
            .sum();
        assert_eq!(rep.total as usize, brute);

        let duals = Instance {
            points: PointSet::Dual(circles.iter().map(circle_dual).collect()),
            curves: CurveSet::DualLines(pts.iter().map(dp_dual_line).collect()),
        };
        assert_eq!(count(&duals, &CountOptions::exact()).unwrap().total, rep.total);

        let g1 = AnchoredCircle::new(Vec3::from_ints(1, 0, 0), Vec3::from_ints(0, 0, 1)).unwrap();
        let g2 = AnchoredCircle::new(Vec3::from_ints(0, 1, 0), Vec3::from_ints(0, 0, 1)).unwrap();
        let sp = vec![
            Vec3::zero(),
            Vec3::from_ints(2, 0, 0),
            Vec3::from_ints(1, 1, 0),
            Vec3::from_ints(1, 1, 1),
        ];
        let inst = Instance {
            points: PointSet::Space(sp.clone()),
            curves: CurveSet::Anchored(vec![g1.clone(), g2.clone()]),
        };
        let rep = count(&inst, &CountOptions::prefilter()).unwrap();
        assert_eq!(rep.per_point, vec![2, 1, 2, 0]);
        for (i, p) in sp.iter().enumerate() {
            let k = [&g1, &g2].iter().filter(|g| anchored_incident(p, g)).count();
            assert_eq!(rep.per_point[i] as usize, k);
        }

        let lines = vec![
            HorizontalLine::new(int(1), int(0), int(0)),
            HorizontalLine::new(int(-1), int(2), int(0)),
        ];
        let inst = Instance {
            points: PointSet::Space(vec![Vec3::from_ints(1, 1, 0), Vec3::from_ints(1, 1, 1)]),
            curves: CurveSet::HorizontalLines(lines),
        };
        assert_eq!(count(&inst, &CountOptions::exact()).unwrap().per_point, vec![2, 0]);
    }

    #[test]
    fn pencil_and_empty() {
        let dp = DirectedPoint::new(Vec2::zero(), int(0));
        let circles: Vec<Circle2> = (1..=20).map(|k| circle(0, k, k * k)).collect();
        let inst = Instance {
            points: PointSet::Directed(vec![dp]),
            curves: CurveSet::Circles(circles),
        };
        let rep = count(&inst, &CountOptions::exact()).unwrap();
        assert_eq!(rep.total, 20);
        assert_eq!(t_rich_points(&inst, 2, &CountOptions::exact()).unwrap(), vec![0]);

        let empty = Instance {
            points: PointSet::Directed(vec![]),
            curves: CurveSet::Circles(vec![circle(0, 0, 1)]),
        };
        let rep = count(&empty, &CountOptions::exact()).unwrap();
        assert_eq!((rep.total, rep.m, rep.n), (0, 0, 1));
        assert_eq!(bound_ratio(&rep), 0.0);
    }

    #[test]
    fn disjoint_instance_has_no_rich_points() {
        let inst = Instance {
            points: PointSet::Directed(vec![DirectedPoint::new(Vec2::from_ints(9, 9), int(0))]),
            curves: CurveSet::Circles(vec![circle(0, 0, 1)]),
        };
        assert!(t_rich_points(&inst, 1, &CountOptions::exact()).unwrap().is_empty());
        assert_eq!(t_rich_points(&inst, 0, &CountOptions::exact()), Err(Error::BadPointThreshold));
    }

    #[test]
    fn mixed_kinds_rejected() {
        let inst = Instance {
            points: PointSet::Directed(vec![]),
            curves: CurveSet::Anchored(vec![]),
        };
        assert!(matches!(count(&inst, &CountOptions::exact()), Err(Error::MixedKinds { .. })));
        let bad = CountOptions {
            slack: 0.5,
            ..CountOptions::prefilter()
        };
        let ok = Instance {
            points: PointSet::Directed(vec![]),
            curves: CurveSet::Circles(vec![]),
        };
        assert_eq!(count(&ok, &bad), Err(Error::BadPrefilterSlack(0.5)));
    }

    #[test]
    fn big_coordinates_use_exact_fallback() {
        let huge = Rational::new(BigInt::from(10).pow(40) + 1, BigInt::from(3));
        let c = Circle2::new(Vec2::new(huge.clone(), int(0)), int(1)).unwrap();
        let on = DirectedPoint::new(Vec2::new(&huge + int(1), int(0)), int(0));
        let top = DirectedPoint::new(Vec2::new(huge.clone(), int(1)), int(0));
        let inst = Instance {
            points: PointSet::Directed(vec![on, top]),
            curves: CurveSet::Circles(vec![c]),
        };
        for opts in [CountOptions::exact(), CountOptions::prefilter()] {
            assert_eq!(count(&inst, &opts).unwrap().per_point, vec![0, 1]);
        }
    }

    #[test]
    fn fits() {
        let linear: Vec<(usize, usize, u64)> =
            (0..5).map(|i| (100 << i, 100 << i, 2 * (100u64 << i))).collect();
        let fit = exponent_fit(&linear).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.01);
        assert!(fit.residual < 1e-9);
        let st: Vec<(usize, usize, u64)> = (0..5)
            .map(|i| {
                let m = 64usize << i;
                (m, m, (m as f64).powf(4.0 / 3.0) as u64)
            })
            .collect();
        assert!((exponent_fit(&st).unwrap().slope - 4.0 / 3.0).abs() < 0.01);
        assert!(exponent_fit(&linear[..2]).is_err());
        assert!(exponent_fit(&[(4, 4, 1), (4, 4, 2), (4, 4, 3)]).is_err());
        assert!(exponent_fit(&[(4, 4, 0), (8, 8, 2), (16, 16, 3)]).is_err());
    }

    #[test]
    fn report_outputs() {
        let rep = IncidenceReport {
            m: 2,
            n: 3,
            total: 1,
            mode: Mode::Prefilter,
            seconds: 0.5,
            exact_checks: 1,
            per_point: vec![1, 0],
            per_curve: vec![0, 1, 0],
        };
        assert!(rep.histograms_consistent());
        let j = rep.to_json(false);
        assert_eq!(j["mode"], "prefilter");
        assert!(j.get("per_point").is_none());
        assert!(rep.to_json(true).get("per_curve").is_some());
        assert_eq!(rep.csv_record()[3], "prefilter");
        assert!((bound_ratio(&rep) - 1.0 / (6f64.powf(0.6) + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn instance_json_round_trip() {
        let (pts, circles) = tangency_instance();
        let inst = Instance {
            points: PointSet::Directed(pts),
            curves: CurveSet::Circles(circles),
        };
        let s = serde_json::to_string(&inst).unwrap();
        assert!(s.starts_with(r#"{"points":{"kind":"directed","items":[{"p":["0","0"],"u":"0"}"#));
        assert_eq!(serde_json::from_str::<Instance>(&s).unwrap(), inst);
    }
}
