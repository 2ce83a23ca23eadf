//! Constructive polynomial partitioning at desk scale.
//!
//! Level `j` finds one polynomial that roughly bisects each of the `2^(j-1)`
//! current classes at once, by a linear search over Veronese-lifted points:
//! the coefficient vector is repeatedly projected onto the space of
//! polynomials vanishing at every class median. The float solution is
//! snapped to bounded-denominator rationals, so classification and curve
//! crossings are exact.
//!
//! Cells are sign-vector classes of the factors. Each connected component of
//! the complement of the zero set lies inside one class, so class
//! populations bound component populations from above.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{coprime_basis, isolate_union, to_f64, Endpoint, Exponent, Rational, RationalCurve, TriPoly, UniPoly, Vec3};
use crate::kernel::restrict_to_affine_curve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelBalance {
    pub level: usize,
    pub classes: usize,
    pub degree: u32,
    /// Largest class after the level.
    pub max_class: usize,
    /// Points that fell on the zero set at this level.
    pub zero_points: usize,
    /// `max_class / (m / 2^level) - 1`.
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionPoly {
    pub factors: Vec<TriPoly>,
    /// Sum of the factor degrees.
    pub degree_budget: u32,
    pub balance: Vec<LevelBalance>,
    /// Reminder of the cell semantics carried into every report.
    pub cells: String,
}

impl PartitionPoly {
    pub fn degrees(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.total_degree()).collect()
    }
}

pub const CELL_NOTE: &str = "sign-vector classes (coarsening of connected components)";

#[derive(Clone, Debug)]
pub struct PartitionOptions {
    pub levels: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Random restarts per level before giving up.
    pub retries: usize,
    /// Median-projection rounds per restart.
    pub rounds: usize,
    pub threads: Option<usize>,
}

impl PartitionOptions {
    pub fn new(levels: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            levels,
            epsilon,
            seed,
            retries: 60,
            rounds: 40,
            threads: None,
        }
    }
}

/// Least `d` with more monomials of degree `<= d` in 3 variables than
/// `classes`.
pub fn level_degree(classes: usize) -> u32 {
    (1u32..)
        .find(|&d| {
            let d = d as usize;
            (d + 1) * (d + 2) * (d + 3) / 6 > classes
        })
        .expect("monomial count grows without bound")
}

fn monomials(d: u32) -> Vec<Exponent<3>> {
    let mut out = Vec::new();
    for total in 0..=d {
        for i in (0..=total).rev() {
            for j in (0..=total - i).rev() {
                out.push([i, j, total - i - j]);
            }
        }
    }
    out
}

fn veronese(p: &[f64; 3], monos: &[Exponent<3>]) -> Vec<f64> {
    monos
        .iter()
        .map(|e| p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32))
        .collect()
}

/// Affine normalization `x' = (x - origin) / scale` onto `[-1, 1]^3`.
struct Frame {
    origin: [Rational; 3],
    scale: [Rational; 3],
}

impl Frame {
    fn fit(points: &[Vec3]) -> Self {
        let axis = |k: usize| {
            let vals = points.iter().map(|p| p.coords()[k]);
            let lo = vals.clone().min().expect("nonempty").clone();
            let hi = vals.max().expect("nonempty").clone();
            let half = Rational::new(1.into(), 2.into());
            let scale = (&hi - &lo) * &half;
            let scale = if scale.is_zero() { Rational::from_integer(1.into()) } else { scale };
            ((lo + hi) * half, scale)
        };
        let (o0, s0) = axis(0);
        let (o1, s1) = axis(1);
        let (o2, s2) = axis(2);
        Self {
            origin: [o0, o1, o2],
            scale: [s0, s1, s2],
        }
    }

    fn apply(&self, p: &Vec3) -> [Rational; 3] {
        let c = p.coords();
        [0, 1, 2].map(|k| (c[k] - &self.origin[k]) / &self.scale[k])
    }

    /// `h((x - o) / s)` expanded in the original coordinates.
    fn pull_back(&self, h: &TriPoly) -> TriPoly {
        let subs: Vec<TriPoly> = (0..3)
            .map(|k| {
                let inv = Rational::from_integer(1.into()) / &self.scale[k];
                &TriPoly::var(k).scale(&inv) - &TriPoly::constant(&self.origin[k] * &inv)
            })
            .collect();
        let mut out = TriPoly::zero();
        for (e, c) in h.terms() {
            let mut t = TriPoly::constant(c.clone());
            for k in 0..3 {
                t = &t * &subs[k].pow(e[k]);
            }
            out = &out + &t;
        }
        out
    }
}

fn sign_of(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Splits every class by the sign of `values`; returns the new classes in
/// (class, minus, plus) order and the number of zeros.
fn split(classes: &[Vec<usize>], signs: &[i8]) -> (Vec<Vec<usize>>, usize) {
    let mut out = Vec::with_capacity(2 * classes.len());
    let mut zeros = 0;
    for cls in classes {
        let (mut neg, mut pos) = (Vec::new(), Vec::new());
        for &i in cls {
            match signs[i] {
                -1 => neg.push(i),
                1 => pos.push(i),
                _ => zeros += 1,
            }
        }
        out.push(neg);
        out.push(pos);
    }
    (out, zeros)
}

/// Largest side of any class under the float cut `a . v(p)`.
fn float_imbalance(classes: &[Vec<usize>], lifted: &[Vec<f64>], a: &DVector<f64>) -> usize {
    classes
        .iter()
        .map(|cls| {
            let pos = cls
                .iter()
                .filter(|&&i| lifted[i].iter().zip(a.iter()).map(|(x, y)| x * y).sum::<f64>() > 0.0)
                .count();
            pos.max(cls.len() - pos)
        })
        .max()
        .unwrap_or(0)
}

/// Median-projection search for one level; returns the best float cut.
fn search_level(
    classes: &[Vec<usize>],
    lifted: &[Vec<f64>],
    dim: usize,
    rounds: usize,
    rng: &mut ChaCha8Rng,
) -> DVector<f64> {
    let mut a = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
    let mut best = (usize::MAX, a.clone());
    let mut prev_medians: Vec<usize> = Vec::new();
    for _ in 0..rounds {
        let medians: Vec<usize> = classes
            .iter()
            .filter(|c| !c.is_empty())
            .map(|cls| {
                let mut vals: Vec<(f64, usize)> = cls
                    .iter()
                    .map(|&i| (lifted[i].iter().zip(a.iter()).map(|(x, y)| x * y).sum(), i))
                    .collect();
                let mid = vals.len() / 2;
                vals.select_nth_unstable_by(mid, |x, y| x.0.total_cmp(&y.0));
                vals[mid].1
            })
            .collect();
        let rows = DMatrix::from_fn(medians.len(), dim, |r, c| lifted[medians[r]][c]);
        if let Ok(pinv) = rows.clone().pseudo_inverse(1e-10) {
            let correction = &pinv * (&rows * &a);
            a -= correction;
        }
        let norm = a.norm();
        if norm < 1e-12 {
            a = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
            continue;
        }
        a /= norm;
        let score = float_imbalance(classes, lifted, &a);
        if score < best.0 {
            best = (score, a.clone());
        }
        if medians == prev_medians {
            break;
        }
        prev_medians = medians;
    }
    // local improvement: nudge one coefficient at a time either way and
    // keep strict gains, with shrinking steps
    let mut a = best.1;
    let mut score = best.0;
    for step in 0..4 * dim {
        let k = step % dim;
        for sgn in [1.0, -1.0] {
            let mut cand = a.clone();
            cand[k] += sgn * 0.05 / (1 + step / dim) as f64;
            let s = float_imbalance(classes, lifted, &cand);
            if s < score {
                score = s;
                a = cand;
            }
        }
    }
    a
}

/// Snaps a float cut to integer coefficients over `2^24`.
fn snap(a: &DVector<f64>, monos: &[Exponent<3>]) -> TriPoly {
    let max = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let den = Rational::from_integer((1i64 << 24).into());
    TriPoly::from_terms(monos.iter().zip(a.iter()).map(|(e, &x)| {
        let k = (x / max * (1u64 << 24) as f64).round() as i64;
        (*e, Rational::from_integer(k.into()) / &den)
    }))
}

fn exact_signs(poly: &TriPoly, pts: &[[Rational; 3]]) -> Vec<i8> {
    pts.par_iter().map(|p| sign_of(&poly.eval(p))).collect()
}

pub fn build_partition(points: &[Vec3], opts: &PartitionOptions) -> Result<PartitionPoly> {
    let m = points.len();
    let needed = 1usize.checked_shl(opts.levels as u32).unwrap_or(usize::MAX);
    if m < needed {
        return Err(Error::TooFewPoints { needed, got: m });
    }
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::BadEpsilon(opts.epsilon));
    }
    crate::engine::with_threads(opts.threads, || build_levels(points, opts))
}

fn build_levels(points: &[Vec3], opts: &PartitionOptions) -> Result<PartitionPoly> {
    let m = points.len();
    let frame = Frame::fit(points);
    let normalized: Vec<[Rational; 3]> = points.iter().map(|p| frame.apply(p)).collect();
    let floats: Vec<[f64; 3]> = normalized.iter().map(|p| p.each_ref().map(to_f64)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut classes = vec![(0..m).collect::<Vec<usize>>()];
    let mut factors = Vec::new();
    let mut balance = Vec::new();
    for level in 1..=opts.levels {
        let degree = level_degree(classes.len());
        let monos = monomials(degree);
        let lifted: Vec<Vec<f64>> = floats.par_iter().map(|p| veronese(p, &monos)).collect();
        let target = m as f64 / (1u64 << level) as f64;
        let limit = ((1.0 + opts.epsilon) * target).floor() as usize;
        let mut best_eps = f64::INFINITY;
        let mut accepted = None;
        for _ in 0..opts.retries {
            let a = search_level(&classes, &lifted, monos.len(), opts.rounds, &mut rng);
            let float_max = float_imbalance(&classes, &lifted, &a);
            if float_max > limit + 2 {
                best_eps = best_eps.min(float_max as f64 / target - 1.0);
                continue;
            }
            let h = snap(&a, &monos);
            if h.is_zero() {
                continue;
            }
            let signs = exact_signs(&h, &normalized);
            let (next, zeros) = split(&classes, &signs);
            let max_class = next.iter().map(Vec::len).max().unwrap_or(0);
            let eps = max_class as f64 / target - 1.0;
            best_eps = best_eps.min(eps);
            if max_class <= limit {
                accepted = Some((h, next, zeros, max_class, eps));
                break;
            }
        }
        let Some((h, next, zeros, max_class, eps)) = accepted else {
            return Err(Error::RetryBudgetExhausted {
                level,
                best_epsilon: best_eps,
            });
        };
        balance.push(LevelBalance {
            level,
            classes: next.len(),
            degree,
            max_class,
            zero_points: zeros,
            epsilon: eps,
        });
        factors.push(frame.pull_back(&h));
        classes = next;
    }
    let degree_budget = factors.iter().map(|f: &TriPoly| f.total_degree()).sum();
    Ok(PartitionPoly {
        factors,
        degree_budget,
        balance,
        cells: CELL_NOTE.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellAssignment {
    /// Sign of each factor at each point, in `{-1, 0, 1}`.
    pub signs: Vec<Vec<i8>>,
    /// Cell id (`+`/`-` string) per point, `None` on the zero set.
    pub cells: Vec<Option<String>>,
    pub populations: BTreeMap<String, usize>,
    pub zero_set: usize,
}

fn sign_key(signs: &[i8]) -> Option<String> {
    signs
        .iter()
        .map(|&s| match s {
            1 => Some('+'),
            -1 => Some('-'),
            _ => None,
        })
        .collect()
}

impl CellAssignment {
    pub fn max_population(&self) -> usize {
        self.populations.values().copied().max().unwrap_or(0)
    }

    /// `point,cell,zero_set` rows; zero-set points carry their raw sign
    /// string with `0` entries.
    pub fn csv_rows(&self) -> Vec<[String; 3]> {
        self.signs
            .iter()
            .zip(&self.cells)
            .enumerate()
            .map(|(i, (s, c))| {
                let raw: String = s.iter().map(|&v| match v { 1 => '+', -1 => '-', _ => '0' }).collect();
                [i.to_string(), c.clone().unwrap_or(raw), c.is_none().to_string()]
            })
            .collect()
    }
}

pub fn classify(points: &[Vec3], pp: &PartitionPoly) -> CellAssignment {
    let signs: Vec<Vec<i8>> = points
        .par_iter()
        .map(|p| {
            let pt = [p.x.clone(), p.y.clone(), p.z.clone()];
            pp.factors.iter().map(|f| sign_of(&f.eval(&pt))).collect()
        })
        .collect();
    let cells: Vec<Option<String>> = signs.iter().map(|s| sign_key(s)).collect();
    let mut populations = BTreeMap::new();
    let mut zero_set = 0;
    for c in &cells {
        match c {
            Some(k) => *populations.entry(k.clone()).or_insert(0) += 1,
            None => zero_set += 1,
        }
    }
    CellAssignment {
        signs,
        cells,
        populations,
        zero_set,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorCrossing {
    /// The curve lies in the factor's zero set.
    Contained,
    Crossings(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub per_factor: Vec<FactorCrossing>,
    /// Distinct parameters where some non-containing factor vanishes.
    pub total: usize,
    /// Distinct real parameters where the curve goes through infinity.
    pub poles: usize,
    /// Distinct sign classes met on the arcs between crossings and poles.
    pub classes_visited: usize,
}

/// Sample parameters, one inside each gap of the sorted isolating intervals.
fn gap_samples(intervals: &[(Rational, Rational)]) -> Vec<Rational> {
    let one = Rational::from_integer(1.into());
    let half = Rational::new(1.into(), 2.into());
    if intervals.is_empty() {
        return vec![Rational::zero()];
    }
    let mut out = vec![&intervals[0].0 - &one];
    for w in intervals.windows(2) {
        let (a, b) = (&w[0].1, &w[1].0);
        out.push(if a < b { (a + b) * &half } else { a.clone() });
    }
    out.push(&intervals[intervals.len() - 1].1 + &one);
    out
}

pub fn curve_crossings(curve: &RationalCurve, pp: &PartitionPoly) -> Result<CrossingReport> {
    let mut per_factor = Vec::new();
    let mut restricted = Vec::new();
    for f in &pp.factors {
        let h = restrict_to_affine_curve(f, curve);
        if h.is_zero() {
            per_factor.push(FactorCrossing::Contained);
            continue;
        }
        per_factor.push(FactorCrossing::Crossings(h.real_root_count()?));
        restricted.push(h);
    }
    // distinct roots of the union without forming the product
    let mut total = 0;
    for b in coprime_basis(&restricted) {
        total += b.real_root_count()?;
    }
    let dens = curve.denominator_product();
    let poles = dens.real_root_count()?;
    restricted.push(dens);
    let breaks = isolate_union(&restricted)?;
    let mut visited = BTreeSet::new();
    for s in gap_samples(&breaks) {
        let pt = curve.point_at(&s).expect("sample avoids denominator roots");
        let p = [pt.x, pt.y, pt.z];
        let key: Vec<i8> = pp.factors.iter().map(|f| sign_of(&f.eval(&p))).collect();
        visited.insert(key);
    }
    Ok(CrossingReport {
        per_factor,
        total,
        poles,
        classes_visited: visited.len(),
    })
}

/// Dense sampling of a restricted polynomial against its Sturm counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleAgreement {
    /// Sign changes seen between consecutive samples, including the two
    /// unbounded end brackets.
    pub sign_changes: usize,
    pub sturm_total: usize,
    /// Brackets whose Sturm count has the wrong parity for the observed
    /// sign pattern.
    pub disagreements: usize,
}

/// Sign of `h(s)` by floating point, falling back to exact evaluation when
/// the value is within the rounding bound.
fn sampled_sign(h: &UniPoly, hf: &[f64], s: &Rational) -> i8 {
    let x = to_f64(s);
    let (mut v, mut mag) = (0.0f64, 0.0f64);
    for c in hf.iter().rev() {
        v = v * x + c;
        mag = mag * x.abs() + c.abs();
    }
    let bound = 4.0 * (hf.len() as f64 + 1.0) * f64::EPSILON * mag;
    if v.is_finite() && v.abs() > bound {
        if v > 0.0 {
            1
        } else {
            -1
        }
    } else {
        sign_of(&h.eval(s))
    }
}

/// Samples `h` at `samples` dyadic parameters spread over the line by
/// `s = tan(theta)` and checks every bracket between nonzero samples: a
/// sign change must come with an odd Sturm count and no change with an
/// even one.
pub fn sampled_crossings(h: &UniPoly, samples: usize) -> Result<SampleAgreement> {
    let h = h.square_free();
    let Some(deg) = h.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    let scale = (1u64 << 20) as f64;
    let mut params: Vec<Rational> = (1..samples)
        .map(|k| {
            let theta = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / samples as f64;
            Rational::new(((theta.tan() * scale).round() as i64).into(), (1i64 << 20).into())
        })
        .collect();
    params.dedup();
    let lead = sign_of(h.leading().expect("nonzero"));
    let hf: Vec<f64> = {
        let ints = h.primitive();
        let top = ints.coeffs().iter().map(|c| c.numer().bits()).max().unwrap_or(0);
        let shift = Rational::from_integer(num_bigint::BigInt::from(2)).pow(-(top.saturating_sub(60) as i32));
        ints.coeffs().iter().map(|c| to_f64(&(c * &shift))).collect()
    };
    let mut points = vec![Endpoint::NegInfinity];
    let mut signs = vec![if deg % 2 == 0 { lead } else { -lead }];
    for s in params {
        signs.push(sampled_sign(&h, &hf, &s));
        points.push(Endpoint::Finite(s));
    }
    points.push(Endpoint::PosInfinity);
    signs.push(lead);
    let vars = h.sturm_variations(&points)?;
    let sturm_total = vars[0] - vars[vars.len() - 1];
    let (mut sign_changes, mut disagreements) = (0, 0);
    let mut last = 0;
    for k in 1..points.len() {
        if signs[k] == 0 {
            continue;
        }
        // roots in the open bracket (points[last], points[k])
        let inside = vars[last] - vars[k];
        let changed = signs[k] != signs[last];
        sign_changes += usize::from(changed);
        disagreements += usize::from(changed != (inside % 2 == 1));
        last = k;
    }
    Ok(SampleAgreement {
        sign_changes,
        sturm_total,
        disagreements,
    })
}

/// Bezout-style ceiling on the crossing total for a curve of degree
/// `curve_degree`.
pub fn bezout_bound(curve_degree: u32, pp: &PartitionPoly) -> u32 {
    curve_degree * pp.degree_budget
}
