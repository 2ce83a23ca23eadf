//! Cross-module invariant suite.
//!
//! Each entry of [`MANIFEST`] names one invariant; [`run_check`] evaluates
//! it on seeded random and constructed inputs. Trial counts are the
//! documented sizes multiplied by [`VerifyConfig::scale`].

use std::collections::BTreeSet;
use std::time::Instant;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::anchored::{
    anchored_incident, anchored_intersection, anchored_through_pair, cubic_surface, from_params,
    h_p_sample, lifted_contains, lifted_intersection, lifted_param, sphere_point, to_params,
    AnchoredCircle, Chart, LiftedCircle,
};
use crate::dual::{
    circle_dual, dp_dual_line, dual_incidence, dual_on_plane, encode_power, line_in_dual_plane,
    line_in_plane, line_in_plane_geometric, plane_to_power, rich_planes, DualPlane,
};
use crate::engine::{count, CountOptions, CurveSet, IncidenceReport, Instance, PointSet};
use crate::generators::{
    certify, fstar_eval, gen, horizontal_line_fstar, horizontal_lines_meet, st_grid, GenKind,
    GenSpec, Sampler,
};
use crate::engine::HorizontalLine;
use crate::kernel::{det3, format_rational, int, parse_rational, rat, resultant, Poly, Rational, UniPoly, Vec2, Vec3};
use crate::partition::{
    bezout_bound, build_partition, curve_crossings, level_degree, sampled_crossings, FactorCrossing,
    PartitionOptions, PartitionPoly,
};
use crate::kernel::restrict_to_affine_curve;
use crate::tangency::{
    common_circle, eval_f, is_tangent, orthogonal_tangent_circle, power,
    tangent_point_sample, Circle2, DirectedPoint, FStatus,
};

/// `(module, invariant id, soft)`; soft checks report without failing.
pub const MANIFEST: &[(&str, &str, bool)] = &[
    ("exact-kernel", "rational-exactness", false),
    ("exact-kernel", "sturm-vs-numeric", false),
    ("exact-kernel", "resultant-vs-gcd", false),
    ("plane-tangency", "common-circle-characterization", false),
    ("plane-tangency", "common-circle-uniqueness", false),
    ("plane-tangency", "triple-collinearity", false),
    ("plane-tangency", "orthogonal-circle-output", false),
    ("anchored-space", "anchored-pair-bound", false),
    ("anchored-space", "anchored-dual-uniqueness", false),
    ("anchored-space", "lift-tangency-equivalence", false),
    ("anchored-space", "cubic-surface-vanishing", false),
    ("anchored-space", "lifted-pair-bound", false),
    ("anchored-space", "dual-params-round-trip", false),
    ("dual3", "master-duality", false),
    ("dual3", "power-decoding", false),
    ("dual3", "line-in-plane-geometric", false),
    ("dual3", "rich-planes-completeness", false),
    ("incidence-engine", "mode-equivalence", false),
    ("incidence-engine", "thread-determinism", false),
    ("incidence-engine", "histogram-consistency", false),
    ("incidence-engine", "throughput", true),
    ("partition", "partition-balance", false),
    ("partition", "degree-accounting", false),
    ("partition", "crossing-soundness", false),
    ("partition", "bezout-bound", false),
    ("generators", "seed-determinism", false),
    ("generators", "planted-soundness", false),
    ("generators", "st-grid-enumeration", false),
    ("generators", "fstar-eliminant", false),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplier on the documented trial counts.
    pub scale: f64,
    pub threads: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            scale: 1.0,
            threads: None,
        }
    }
}

impl VerifyConfig {
    fn trials(&self, base: usize) -> usize {
        ((base as f64 * self.scale).round() as usize).max(10.min(base))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub module: String,
    pub id: String,
    pub trials: usize,
    pub failures: usize,
    pub soft: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.soft || self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Outcome of one check body.
#[derive(Default)]
struct Tally {
    trials: usize,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

pub fn verify_all(cfg: &VerifyConfig) -> VerifyReport {
    VerifyReport {
        checks: MANIFEST.iter().map(|(_, id, _)| run_check(id, cfg).expect("manifest id")).collect(),
    }
}

/// Runs the invariant `id`; `None` for an unknown id.
pub fn run_check(id: &str, cfg: &VerifyConfig) -> Option<Check> {
    let &(module, _, soft) = MANIFEST.iter().find(|(_, i, _)| *i == id)?;
    let seed = cfg.seed ^ fxhash(id);
    let mut s = Sampler::new(seed, 100, 100);
    let start = Instant::now();
    let t = crate::engine::with_threads(cfg.threads, || dispatch(id, cfg, &mut s));
    Some(Check {
        module: module.to_string(),
        id: id.to_string(),
        trials: t.trials,
        failures: t.failures,
        soft,
        detail: t.notes.join("; "),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Small stable string hash so each check draws an independent stream.
fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn dispatch(id: &str, cfg: &VerifyConfig, s: &mut Sampler) -> Tally {
    match id {
        "rational-exactness" => rational_exactness(s, cfg.trials(10_000)),
        "sturm-vs-numeric" => sturm_vs_numeric(s, cfg.trials(10_000)),
        "resultant-vs-gcd" => resultant_vs_gcd(s, cfg.trials(1_000)),
        "common-circle-characterization" => common_circle_characterization(s, cfg.trials(100_000)),
        "common-circle-uniqueness" => common_circle_uniqueness(s, cfg.trials(10_000)),
        "triple-collinearity" => triple_collinearity(s, cfg.trials(10_000), cfg.trials(100_000)),
        "orthogonal-circle-output" => orthogonal_output(s, cfg.trials(10_000)),
        "anchored-pair-bound" => anchored_pair_bound(s, cfg.trials(10_000)),
        "anchored-dual-uniqueness" => anchored_dual_uniqueness(s, cfg.trials(10_000)),
        "lift-tangency-equivalence" => lift_tangency(s, cfg.trials(10_000)),
        "cubic-surface-vanishing" => cubic_vanishing(s, cfg.trials(1_000), 10),
        "lifted-pair-bound" => lifted_pair_bound(s, cfg.trials(10_000)),
        "dual-params-round-trip" => dual_params_round_trip(s, cfg.trials(10_000)),
        "master-duality" => master_duality(s, cfg.trials(100_000)),
        "power-decoding" => power_decoding(s, cfg.trials(10_000)),
        "line-in-plane-geometric" => line_in_plane_check(s, cfg.trials(10_000)),
        "rich-planes-completeness" => rich_planes_check(s, cfg.trials(20)),
        "mode-equivalence" => mode_equivalence(cfg, false),
        "thread-determinism" => thread_determinism(cfg),
        "histogram-consistency" => mode_equivalence(cfg, true),
        "throughput" => throughput(cfg.trials(20_000).max(500)),
        "partition-balance" => partition_check(cfg, PartitionAspect::Balance),
        "degree-accounting" => partition_check(cfg, PartitionAspect::Degrees),
        "crossing-soundness" => partition_check(cfg, PartitionAspect::Crossings),
        "bezout-bound" => partition_check(cfg, PartitionAspect::Bezout),
        "seed-determinism" => seed_determinism(cfg),
        "planted-soundness" => planted_soundness(cfg),
        "st-grid-enumeration" => st_grid_enumeration(if cfg.scale >= 1.0 { 30 } else { 12 }),
        "fstar-eliminant" => fstar_check(s, cfg.trials(1_000)),
        _ => unreachable!("manifest and dispatch disagree on {id}"),
    }
}

// ---- exact kernel ----

fn rational_exactness(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    for _ in 0..trials {
        let (a, b) = (s.rational(), s.rational());
        let k: i64 = s.rng().gen_range(1..1000);
        let scaled = Rational::new(a.numer() * k, a.denom() * k);
        let mut ok = &(&a + &b) - &b == a && scaled == a && format_rational(&scaled) == format_rational(&a);
        ok &= parse_rational(&format_rational(&a)).ok() == Some(a.clone());
        ok &= a.denom().is_positive();
        if !b.is_zero() {
            ok &= &(&a * &b) / &b == a;
        }
        t.record(ok);
    }
    t.record(format_rational(&(&rat(1, 2) - &rat(1, 2))) == "0");
    t
}

/// Real roots of an integer polynomial via companion-matrix eigenvalues,
/// with near-real values clustered.
pub fn numeric_real_roots(coeffs: &[i64]) -> usize {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg] as f64;
    let comp = DMatrix::from_fn(deg, deg, |r, c| {
        if r == 0 {
            -(coeffs[deg - 1 - c] as f64) / lead
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut reals: Vec<f64> = comp
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * z.re.abs().max(1.0))
        .map(|z| z.re)
        .collect();
    reals.sort_by(f64::total_cmp);
    let mut clusters = 0;
    let mut last: Option<f64> = None;
    for x in reals {
        if last.is_none_or(|l| (x - l).abs() > 1e-6 * x.abs().max(1.0)) {
            clusters += 1;
        }
        last = Some(x);
    }
    clusters
}

fn sturm_vs_numeric(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    for _ in 0..trials {
        let deg = s.rng().gen_range(1..=12);
        let mut coeffs: Vec<i64> = (0..=deg).map(|_| s.rng().gen_range(-100..=100)).collect();
        while coeffs[deg] == 0 {
            coeffs[deg] = s.rng().gen_range(-100..=100);
        }
        let p = UniPoly::from_ints(&coeffs);
        let exact = p.real_root_count().expect("nonzero");
        let numeric = numeric_real_roots(&coeffs);
        if exact != numeric && t.notes.len() < 3 {
            t.note(format!("mismatch on {p}: sturm {exact}, numeric {numeric}"));
        }
        t.record(exact == numeric);
    }
    t
}

fn resultant_vs_gcd(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let x = || Poly::<2>::var(0);
    let y = || Poly::<2>::var(1);
    let c = |v: i64| Poly::<2>::constant(int(v));
    let mut shared = 0;
    while t.trials < trials {
        let r = &mut *s.rng();
        let (a, b, cc, d): (i64, i64, i64, i64) =
            (r.gen_range(-5..=5), r.gen_range(-5..=5), r.gen_range(-5..=5), r.gen_range(-5..=5));
        // p = (x - y)(x - a), q = (x - b y - c)(x - d)
        let p = &(&x() - &y()) * &(&x() - &c(a));
        let q = &(&(&x() - &y().scale(&int(b))) - &c(cc)) * &(&x() - &c(d));
        let res = resultant(&p, &q, 0).expect("degree 2 in x");
        let y0 = if b != 1 && r.gen_bool(0.5) {
            rat(cc, 1 - b)
        } else {
            int(r.gen_range(-6..=6))
        };
        let ps = p.substitute(1, &y0).to_univariate(0).expect("univariate");
        let qs = q.substitute(1, &y0).to_univariate(0).expect("univariate");
        let common = ps.gcd(&qs).degree().is_some_and(|d| d > 0);
        let vanishes = res.eval(&[Rational::zero(), y0]).is_zero();
        shared += usize::from(common);
        t.record(common == vanishes);
    }
    t.note(format!("{shared} specializations with a common root"));
    t
}

// ---- plane tangency ----

/// Random circle through a known rational point, with that point.
fn circle_with_point(s: &mut Sampler) -> (Circle2, Vec2) {
    loop {
        let (w, p) = (s.vec2(), s.vec2());
        if let Ok(c) = Circle2::through(w, &p) {
            return (c, p);
        }
    }
}

fn tangent_sample(s: &mut Sampler, c: &Circle2, known: &Vec2) -> DirectedPoint {
    loop {
        if let Ok(dp) = tangent_point_sample(c, known, s.rng(), 50) {
            return dp;
        }
    }
}

fn distinct_pair_on_circle(s: &mut Sampler) -> (DirectedPoint, DirectedPoint) {
    let (c, known) = circle_with_point(s);
    loop {
        let (a, b) = (tangent_sample(s, &c, &known), tangent_sample(s, &c, &known));
        if a != b {
            return (a, b);
        }
    }
}

fn common_circle_characterization(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let (mut found, mut coincident) = (0, 0);
    for k in 0..trials {
        let (d1, d2) = if k % 2 == 0 {
            (s.directed_point(), s.directed_point())
        } else {
            distinct_pair_on_circle(s)
        };
        if d1 == d2 {
            continue;
        }
        let f = eval_f(&d1, &d2).expect("distinct");
        let cc = common_circle(&d1, &d2).expect("distinct");
        let expected = f.status == FStatus::Regular
            && f.value.is_zero()
            && f.foot.as_ref().is_some_and(|w| *w != d1.p && *w != d2.p);
        let on_circle = k % 2 == 1;
        let ok = cc.is_some() == expected
            && (!on_circle || f.value.is_zero())
            && cc.as_ref().is_none_or(|c| is_tangent(&d1, c) && is_tangent(&d2, c) && c.r2().is_positive());
        found += usize::from(cc.is_some());
        // antipodal pairs of one circle share their normal line
        coincident += usize::from(on_circle && f.status == FStatus::CoincidentFoot);
        t.record(ok);
    }
    t.note(format!("{found} common circles found; {coincident} coincident-foot pairs"));
    t
}

fn common_circle_uniqueness(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let deltas = [rat(1, 1000), rat(-1, 1000), rat(1, 7), rat(-1, 7), int(1), int(-3)];
    for _ in 0..trials {
        let (d1, d2) = distinct_pair_on_circle(s);
        let Some(c) = common_circle(&d1, &d2).expect("distinct") else {
            // only antipodal pairs lack a regular foot
            t.record(eval_f(&d1, &d2).expect("distinct").status == FStatus::CoincidentFoot);
            continue;
        };
        let n = d1.normal();
        // centre parameter of the common circle along the normal of d1
        let tc = (c.center() - &d1.p).dot(&n) / n.norm2();
        let rivals = deltas.iter().any(|dl| {
            let center = &d1.p + &n.scale(&(&tc + dl));
            Circle2::through(center, &d1.p).is_ok_and(|cand| is_tangent(&d2, &cand))
        });
        t.record(!rivals);
    }
    t
}

fn collinear_centers(trip: &[DirectedPoint; 3]) -> Option<bool> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut centers = Vec::new();
    for (i, j) in pairs {
        let c = common_circle(&trip[i], &trip[j]).ok()??;
        centers.push(c.center().clone());
    }
    let lift = |v: &Vec2| Vec3::new(v.x.clone(), v.y.clone(), Rational::one());
    Some(det3(&lift(&centers[0]), &lift(&centers[1]), &lift(&centers[2])).is_zero())
}

fn triple_collinearity(s: &mut Sampler, engineered: usize, search: usize) -> Tally {
    let mut t = Tally::default();
    let mut antipodal = 0;
    while t.trials < engineered {
        let (c, known) = circle_with_point(s);
        let trip = [(); 3].map(|_| tangent_sample(s, &c, &known));
        if trip[0] == trip[1] || trip[0] == trip[2] || trip[1] == trip[2] {
            continue;
        }
        match collinear_centers(&trip) {
            Some(ok) => t.record(ok),
            None => antipodal += 1,
        }
    }
    let mut qualifying = 0;
    for _ in 0..search {
        let trip = [(); 3].map(|_| s.directed_point());
        if let Some(ok) = collinear_centers(&trip) {
            qualifying += 1;
            t.record(ok);
        }
    }
    t.note(format!(
        "{} engineered triples ({antipodal} skipped with an antipodal pair); random search of {search} found {qualifying} pairwise-tangent triples",
        t.trials - qualifying
    ));
    t
}

fn orthogonal_output(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut built = 0;
    for _ in 0..trials {
        let dp = s.directed_point();
        let (w, rho) = (s.vec2(), s.rational());
        match orthogonal_tangent_circle(&dp, &w, &rho) {
            Ok(Some(c)) => {
                built += 1;
                t.record(is_tangent(&dp, &c) && power(&w, &c) == rho);
            }
            Ok(None) => t.record(true),
            Err(_) => t.record(w == dp.p),
        }
    }
    t.note(format!("{built} circles constructed"));
    t
}

// ---- anchored space ----

fn random_ball(s: &mut Sampler) -> Vec3 {
    loop {
        let p = s.vec3().scale(&rat(1, 50));
        if !p.is_zero() && p.norm2() <= int(4) {
            return p;
        }
    }
}

fn anchored_pair_bound(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut second = 0;
    for k in 0..trials {
        let g1 = s.anchored();
        let g2 = if k % 2 == 0 {
            s.anchored()
        } else {
            let p = s.point_on(&g1);
            let samples = h_p_sample(&p, Some(g1.center()), 3).expect("p on g1");
            match samples.into_iter().find(|g| *g != g1) {
                Some(g) => g,
                None => continue,
            }
        };
        if g1 == g2 {
            continue;
        }
        let pts = anchored_intersection(&g1, &g2).expect("distinct");
        let mut ok = pts.len() <= 2 && pts[0].is_zero();
        ok &= pts.iter().all(|p| anchored_incident(p, &g1) && anchored_incident(p, &g2));
        second += usize::from(pts.len() == 2);
        // brute force over rational points of g1
        let mut extra = BTreeSet::new();
        for _ in 0..8 {
            let x = s.point_on(&g1);
            if anchored_incident(&x, &g2) {
                extra.insert(x);
            }
        }
        ok &= extra.len() <= 1 && extra.iter().all(|x| pts.contains(x));
        t.record(ok);
    }
    t.note(format!("{second} pairs with a second common point"));
    t
}

fn anchored_dual_uniqueness(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut found = 0;
    for k in 0..2 * trials {
        let (p, q) = if k % 2 == 0 {
            (random_ball(s), random_ball(s))
        } else {
            let g = s.anchored();
            (s.point_on(&g), s.point_on(&g))
        };
        match anchored_through_pair(&p, &q) {
            Ok(Some(g)) => {
                found += 1;
                t.record(anchored_incident(&p, &g) && anchored_incident(&q, &g));
            }
            Ok(None) => t.record(k % 2 == 0),
            // the sampled pair was collinear with o
            Err(_) => t.record(p.cross(&q).is_zero()),
        }
    }
    let boundary = (trials / 10).max(1);
    for _ in 0..boundary {
        let p = sphere_point(Chart::North, &s.rational(), &s.rational()).scale(&int(2));
        let mid = p.scale(&rat(1, 2));
        let gs = h_p_sample(&p, None, 3).expect("|p| = 2");
        t.record(!gs.is_empty() && gs.iter().all(|g| *g.center() == mid && anchored_incident(&p, g)));
    }
    t.note(format!("{found} circles returned; {boundary} boundary samples"));
    t
}

fn lift_tangency(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    for k in 0..trials {
        let dp = s.directed_point();
        let c = if k % 2 == 0 { s.circle() } else { s.circle_tangent_to(&dp) };
        let lc = LiftedCircle::new(c.clone());
        t.record(lifted_contains(&lc, &dp.as_space_point()) == is_tangent(&dp, &c));
    }
    t
}

fn cubic_vanishing(s: &mut Sampler, circles: usize, per_circle: usize) -> Tally {
    let mut t = Tally::default();
    let dp0 = s.directed_point();
    let f = cubic_surface(&dp0);
    for _ in 0..circles {
        let c = s.circle_tangent_to(&dp0);
        let curve = lifted_param(&LiftedCircle::new(c), &dp0.p).expect("dp0.p on circle");
        let mut done = 0;
        while done < per_circle {
            let param = s.rational();
            if let Some(pt) = curve.point_at(&param) {
                t.record(f.eval(&[pt.x, pt.y, pt.z]).is_zero());
                done += 1;
            }
        }
    }
    t
}

fn lifted_pair_bound(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut touching = 0;
    for k in 0..trials {
        let (c1, c2) = if k % 2 == 0 {
            (s.circle(), s.circle())
        } else {
            let dp = s.directed_point();
            (s.circle_tangent_to(&dp), s.circle_tangent_to(&dp))
        };
        if c1 == c2 {
            continue;
        }
        let (l1, l2) = (LiftedCircle::new(c1.clone()), LiftedCircle::new(c2.clone()));
        let pts = lifted_intersection(&l1, &l2).expect("distinct");
        let ok = pts.len() <= 2
            && pts.iter().all(|p| {
                let dp = DirectedPoint::new(Vec2::new(p.x.clone(), p.y.clone()), p.z.clone());
                lifted_contains(&l1, p) && lifted_contains(&l2, p) && is_tangent(&dp, &c1) && is_tangent(&dp, &c2)
            });
        touching += usize::from(!pts.is_empty());
        t.record(ok && (k % 2 == 0 || !pts.is_empty()));
    }
    t.note(format!("{touching} pairs share a lifted point"));
    t
}

fn dual_params_round_trip(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let poles = [Vec3::from_ints(0, 0, 1), Vec3::from_ints(0, 0, -1)];
    for k in 0..trials {
        let c = if k < 2 {
            poles[k].clone()
        } else {
            sphere_point(Chart::North, &s.rational(), &s.rational())
        };
        let n = c.cross(&s.vec3());
        let Ok(g) = AnchoredCircle::new(c.clone(), n) else {
            continue;
        };
        let d = to_params(&g);
        let chart_ok = (d.chart == Chart::South) == (c == poles[0]);
        let back = sphere_point(d.chart, &d.alpha, &d.beta);
        t.record(chart_ok && back == c && from_params(&d).as_ref() == Ok(&g));
    }
    t
}

// ---- dual ----

fn master_duality(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut tangent = 0;
    // `trials` random pairs, plus as many with a planted tangency
    for k in 0..2 * trials {
        let dp = s.directed_point();
        let c = if k % 2 == 0 { s.circle() } else { s.circle_tangent_to(&dp) };
        let a = is_tangent(&dp, &c);
        let b = dual_incidence(&dp, &c);
        let l = lifted_contains(&LiftedCircle::new(c), &dp.as_space_point());
        tangent += usize::from(a);
        t.record(a == b && b == l);
    }
    t.note(format!("{tangent} tangent pairs"));
    t
}

fn power_decoding(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    for k in 0..trials {
        let c = s.circle();
        let (a, b) = (s.rational(), s.rational());
        let d = if k % 2 == 0 {
            s.rational()
        } else {
            let x = circle_dual(&c);
            -(&a * &x.xi + &b * &x.eta + &x.zeta)
        };
        let pp = plane_to_power(a, b, d);
        let on = dual_on_plane(&c, &pp);
        let ok = on == (power(&pp.w(), &c) == pp.rho())
            && encode_power(&pp.w(), &pp.rho()) == pp
            && (k % 2 == 0 || on);
        t.record(ok);
    }
    t
}

fn line_in_plane_check(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let mut inside = 0;
    for k in 0..trials {
        let (dp, pp) = if k % 2 == 0 {
            let pp = plane_to_power(s.rational(), s.rational(), s.rational());
            (s.directed_point(), pp)
        } else {
            let (p, w) = (s.vec2(), s.vec2());
            if p.x == w.x || p == w {
                continue;
            }
            let r = &w - &p;
            let dp = DirectedPoint::new(p.clone(), &r.y / &r.x);
            (dp, encode_power(&w, &r.norm2()))
        };
        let direct = line_in_plane(&dp, &pp);
        inside += usize::from(direct);
        if pp.rho().is_positive() {
            t.record(direct == line_in_plane_geometric(&dp, &pp));
        }
        if k % 2 == 1 {
            t.record(direct);
        }
    }
    t.note(format!("{inside} contained lines"));
    t
}

fn rich_planes_check(s: &mut Sampler, instances: usize) -> Tally {
    let mut t = Tally::default();
    for _ in 0..instances {
        let mut pts = Vec::new();
        let mut planted: Vec<(DualPlane, Vec<usize>)> = Vec::new();
        let planes = s.rng().gen_range(1..=3);
        for _ in 0..planes {
            let w = s.vec2();
            let (c, known) = loop {
                let p = s.vec2();
                if let Ok(c) = Circle2::through(w.clone(), &p) {
                    break (c, p);
                }
            };
            let size = s.rng().gen_range(3..=6);
            let mut members = Vec::new();
            while members.len() < size {
                let p = c.point_from(&known, &s.rational());
                let r = &w - &p;
                if r.x.is_zero() {
                    continue;
                }
                let dp = DirectedPoint::new(p, &r.y / &r.x);
                if pts.contains(&dp) {
                    continue;
                }
                members.push(pts.len());
                pts.push(dp);
            }
            planted.push((DualPlane::Power(encode_power(&w, c.r2())), members));
        }
        for _ in 0..s.rng().gen_range(0..=6) {
            pts.push(s.directed_point());
        }
        let rich = rich_planes(&pts, 3).expect("q = 3");
        for (plane, members) in &planted {
            let found = rich.iter().find(|r| r.plane == *plane);
            t.record(found.is_some_and(|r| r.members == *members));
        }
        t.record(rich.iter().all(|r| r.members.iter().all(|&k| line_in_dual_plane(&pts[k], &r.plane))));
    }
    t
}

// ---- engine ----

fn engine_instances(cfg: &VerifyConfig) -> Vec<(String, Instance)> {
    let size = ((400.0 * cfg.scale.min(1.0)).round() as usize).max(40);
    let mut out = Vec::new();
    for (kind, density) in [
        (GenKind::RandomTangency, 0.3),
        (GenKind::CircleSampled, 0.0),
        (GenKind::AnchoredPlanted, 0.2),
        (GenKind::StGridHorizontalLines, 0.0),
        (GenKind::Pencil, 0.0),
    ] {
        let spec = GenSpec::new(kind, size, size, cfg.seed).with_density(density);
        out.push((kind.name().to_string(), gen(&spec).expect("feasible").instance));
    }
    let cs = gen(&GenSpec::new(GenKind::CircleSampled, size, size, cfg.seed + 1)).expect("feasible");
    if let (PointSet::Directed(p), CurveSet::Circles(c)) = (&cs.instance.points, &cs.instance.curves) {
        out.push((
            "dual".into(),
            Instance {
                points: PointSet::Dual(c.iter().map(circle_dual).collect()),
                curves: CurveSet::DualLines(p.iter().map(dp_dual_line).collect()),
            },
        ));
        out.push((
            "lifted".into(),
            Instance {
                points: PointSet::Space(p.iter().map(DirectedPoint::as_space_point).collect()),
                curves: CurveSet::Lifted(c.iter().cloned().map(LiftedCircle::new).collect()),
            },
        ));
    }
    out
}

fn same_counts(a: &IncidenceReport, b: &IncidenceReport) -> bool {
    a.total == b.total && a.per_point == b.per_point && a.per_curve == b.per_curve
}

fn mode_equivalence(cfg: &VerifyConfig, histograms: bool) -> Tally {
    let mut t = Tally::default();
    for (name, inst) in engine_instances(cfg) {
        let e = count(&inst, &CountOptions::exact()).expect("homogeneous");
        let p = count(&inst, &CountOptions::prefilter()).expect("homogeneous");
        if histograms {
            t.record(e.histograms_consistent() && p.histograms_consistent());
        } else {
            t.record(same_counts(&e, &p));
            t.note(format!("{name}: {} incidences, {} exact checks in prefilter mode", e.total, p.exact_checks));
        }
    }
    t
}

fn thread_determinism(cfg: &VerifyConfig) -> Tally {
    let mut t = Tally::default();
    for (_, inst) in engine_instances(cfg).into_iter().take(3) {
        let reports: Vec<IncidenceReport> = [1, 2, 4]
            .iter()
            .map(|&k| {
                let opts = CountOptions {
                    threads: Some(k),
                    ..CountOptions::prefilter()
                };
                count(&inst, &opts).expect("homogeneous").without_timing()
            })
            .collect();
        t.record(reports.windows(2).all(|w| w[0] == w[1]));
    }
    t
}

fn throughput(size: usize) -> Tally {
    let mut t = Tally::default();
    let g = gen(&GenSpec::new(GenKind::RandomTangency, size, size, 1).with_density(0.01)).expect("feasible");
    let rep = count(&g.instance, &CountOptions::prefilter()).expect("homogeneous");
    t.record(rep.seconds < 60.0);
    t.note(format!(
        "m = n = {size}: {:.2}s prefilter on {} threads (target < 60s at 2e4 on 8 cores)",
        rep.seconds,
        rayon::current_num_threads()
    ));
    t
}

// ---- partition ----

#[derive(Clone, Copy, PartialEq, Eq)]
enum PartitionAspect {
    Balance,
    Degrees,
    Crossings,
    Bezout,
}

fn partition_fixture(cfg: &VerifyConfig) -> (Vec<Vec3>, PartitionPoly) {
    let m = ((4096.0 * cfg.scale.min(1.0)).round() as usize).max(512);
    let mut s = Sampler::new(cfg.seed, 100, 100);
    let pts: Vec<Vec3> = (0..m).map(|_| s.vec3()).collect();
    let pp = build_partition(&pts, &PartitionOptions::new(4, 0.1, cfg.seed)).expect("partition");
    (pts, pp)
}

/// Lifted circles with their rational parameterizations.
pub fn lifted_curves(s: &mut Sampler, k: usize) -> Vec<crate::kernel::RationalCurve> {
    (0..k)
        .map(|_| {
            let dp = s.directed_point();
            let c = s.circle_tangent_to(&dp);
            lifted_param(&LiftedCircle::new(c), &dp.p).expect("point on circle")
        })
        .collect()
}

fn partition_check(cfg: &VerifyConfig, aspect: PartitionAspect) -> Tally {
    let mut t = Tally::default();
    let (pts, pp) = partition_fixture(cfg);
    match aspect {
        PartitionAspect::Balance => {
            let cells = crate::partition::classify(&pts, &pp);
            let bound = (1.1 * pts.len() as f64 / 16.0).floor() as usize;
            t.record(cells.max_population() <= bound);
            t.record(cells.populations.values().sum::<usize>() + cells.zero_set == pts.len());
            t.note(format!("max class {} of bound {bound}", cells.max_population()));
        }
        PartitionAspect::Degrees => {
            let expected: u32 = (1..=pp.factors.len()).map(|j| level_degree(1 << (j - 1))).sum();
            t.record(pp.degree_budget == pp.degrees().iter().sum::<u32>());
            t.record(pp.degree_budget <= expected);
            t.note(format!("degrees {:?}, budget {}", pp.degrees(), pp.degree_budget));
        }
        PartitionAspect::Crossings | PartitionAspect::Bezout => {
            let mut s = Sampler::new(cfg.seed ^ 0x5eed, 100, 100);
            let curves = lifted_curves(&mut s, cfg.trials(100));
            let mut seen_all = 0;
            for curve in &curves {
                let rep = curve_crossings(curve, &pp).expect("nonzero factors");
                if aspect == PartitionAspect::Bezout {
                    t.record(rep.total as u32 <= bezout_bound(4, &pp));
                    t.record(rep.classes_visited <= rep.total + rep.poles + 1);
                    continue;
                }
                for (f, fc) in pp.factors.iter().zip(&rep.per_factor) {
                    let FactorCrossing::Crossings(k) = fc else {
                        continue;
                    };
                    let h = restrict_to_affine_curve(f, curve);
                    let a = sampled_crossings(&h, 1000).expect("nonzero");
                    if (a.disagreements > 0 || a.sturm_total != *k) && t.notes.len() < 3 {
                        t.note(format!("sturm {k}: {a:?}"));
                    }
                    seen_all += usize::from(a.sign_changes == a.sturm_total);
                    t.record(a.disagreements == 0 && a.sturm_total == *k && a.sign_changes <= *k);
                }
            }
            if aspect == PartitionAspect::Crossings {
                t.note(format!("{seen_all} of {} restricted factors had every root bracketed by a sign change", t.trials));
            }
        }
    }
    t
}

// ---- generators ----

fn seed_determinism(cfg: &VerifyConfig) -> Tally {
    let mut t = Tally::default();
    for kind in GenKind::ALL {
        let spec = GenSpec::new(kind, 60, 80, cfg.seed).with_density(0.2);
        let a = serde_json::to_string(&gen(&spec).expect("feasible")).expect("json");
        let b = serde_json::to_string(&gen(&spec).expect("feasible")).expect("json");
        t.record(a == b);
    }
    t
}

fn planted_soundness(cfg: &VerifyConfig) -> Tally {
    let mut t = Tally::default();
    let size = ((300.0 * cfg.scale.min(1.0)).round() as usize).max(30);
    for kind in GenKind::ALL {
        let spec = GenSpec::new(kind, size, size, cfg.seed).with_density(0.25);
        let g = gen(&spec).expect("feasible");
        t.record(certify(&g).expect("homogeneous"));
        let total = count(&g.instance, &CountOptions::exact()).expect("homogeneous").total as usize;
        t.record(total >= g.planted_count());
    }
    t
}

fn st_grid_enumeration(max_k: usize) -> Tally {
    let mut t = Tally::default();
    for k in 1..=max_k {
        let grid = st_grid(2 * k * k * k, k * k * k);
        t.record(grid.incidences().len() == grid.incidences_brute());
    }
    t
}

fn fstar_check(s: &mut Sampler, trials: usize) -> Tally {
    let mut t = Tally::default();
    let f = horizontal_line_fstar();
    let mut sign: Option<Rational> = None;
    for k in 0..2 * trials {
        let l1 = HorizontalLine::new(s.rational(), s.rational(), s.rational());
        let l2 = if k < trials {
            // intersecting: same height, or identical
            if k % 10 == 0 {
                l1.clone()
            } else {
                HorizontalLine::new(s.rational(), s.rational(), l1.c.clone())
            }
        } else {
            let mut l = HorizontalLine::new(s.rational(), s.rational(), s.rational());
            while l.c == l1.c || l.a == l1.a {
                l = HorizontalLine::new(s.rational(), s.rational(), s.rational());
            }
            l
        };
        let v = fstar_eval(&f, &l1, &l2);
        let meets = horizontal_lines_meet(&l1, &l2);
        let mut ok = v.is_zero() == meets && (k >= trials) != meets;
        if !v.is_zero() {
            // F* / (c1 - c2) is one fixed nonzero constant
            let ratio = &v / (&l1.c - &l2.c);
            ok &= sign.get_or_insert(ratio.clone()).clone() == ratio;
        }
        t.record(ok);
    }
    if let Some(r) = sign {
        t.note(format!("F* = {} (c1 - c2)", format_rational(&r)));
    }
    t
}
