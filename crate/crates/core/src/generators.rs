//! Seeded instance generators.
//!
//! Every generator draws from a ChaCha stream seeded by `GenSpec::seed`, so
//! a spec determines its instance bit for bit. Planted incidences are built
//! exactly and returned as `(point, curve)` index pairs; [`certify`]
//! re-checks them with the exact predicate.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anchored::{sphere_point, AnchoredCircle, Chart};
use crate::engine::{count_pairs, CurveSet, HorizontalLine, Instance, PointSet};
use crate::error::{Error, Result};
use crate::kernel::{int, resultant, Poly, Rational, Vec2, Vec3};
use crate::tangency::{tangent_point_sample, Circle2, DirectedPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    RandomTangency,
    Pencil,
    CircleSampled,
    StGridHorizontalLines,
    AnchoredRandom,
    AnchoredPlanted,
}

impl GenKind {
    pub const ALL: [GenKind; 6] = [
        GenKind::RandomTangency,
        GenKind::Pencil,
        GenKind::CircleSampled,
        GenKind::StGridHorizontalLines,
        GenKind::AnchoredRandom,
        GenKind::AnchoredPlanted,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GenKind::RandomTangency => "random-tangency",
            GenKind::Pencil => "pencil",
            GenKind::CircleSampled => "circle-sampled",
            GenKind::StGridHorizontalLines => "st-grid-horizontal-lines",
            GenKind::AnchoredRandom => "anchored-random",
            GenKind::AnchoredPlanted => "anchored-planted",
        }
    }
}

fn default_magnitude() -> i64 {
    100
}

fn default_max_den() -> i64 {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub kind: GenKind,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Bound on the absolute value of drawn coordinates.
    #[serde(default = "default_magnitude")]
    pub magnitude: i64,
    /// Bound on drawn denominators.
    #[serde(default = "default_max_den")]
    pub max_den: i64,
    /// Fraction of points (or curves, for random-tangency) built incident.
    #[serde(default)]
    pub density: f64,
}

impl GenSpec {
    pub fn new(kind: GenKind, m: usize, n: usize, seed: u64) -> Self {
        Self {
            kind,
            m,
            n,
            seed,
            magnitude: default_magnitude(),
            max_den: default_max_den(),
            density: if kind == GenKind::AnchoredPlanted { 0.05 } else { 0.0 },
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.magnitude < 1 || self.max_den < 1 {
            return Err(Error::InfeasibleSpec("magnitude and max_den must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::InfeasibleSpec(format!("density {} outside [0, 1]", self.density)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub spec: GenSpec,
    pub instance: Instance,
    /// Distinct planted `(point, curve)` pairs, sorted.
    pub planted: Vec<(usize, usize)>,
}

impl Generated {
    pub fn planted_count(&self) -> usize {
        self.planted.len()
    }
}

/// Rational drawing within the spec bounds.
pub struct Sampler {
    rng: ChaCha8Rng,
    magnitude: i64,
    max_den: i64,
}

impl Sampler {
    pub fn new(seed: u64, magnitude: i64, max_den: i64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            magnitude,
            max_den,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform numerator over a uniform denominator, `|value| <= magnitude`.
    pub fn rational(&mut self) -> Rational {
        let den = self.rng.gen_range(1..=self.max_den);
        let bound = self.magnitude * den;
        Rational::new(self.rng.gen_range(-bound..=bound).into(), den.into())
    }

    pub fn positive(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if !q.is_zero() {
                return if q < Rational::zero() { -q } else { q };
            }
        }
    }

    pub fn vec2(&mut self) -> Vec2 {
        Vec2::new(self.rational(), self.rational())
    }

    pub fn vec3(&mut self) -> Vec3 {
        Vec3::new(self.rational(), self.rational(), self.rational())
    }

    pub fn directed_point(&mut self) -> DirectedPoint {
        DirectedPoint::new(self.vec2(), self.rational())
    }

    pub fn circle(&mut self) -> Circle2 {
        Circle2::new(self.vec2(), self.positive()).expect("positive radius")
    }

    /// Circle tangent to `dp`: centre `p + t (-u, 1)` for random `t != 0`.
    pub fn circle_tangent_to(&mut self, dp: &DirectedPoint) -> Circle2 {
        let t = self.positive() * if self.rng.gen_bool(0.5) { int(1) } else { int(-1) };
        let normal = dp.normal();
        Circle2::new(&dp.p + &normal.scale(&t), &t * &t * normal.norm2()).expect("t != 0")
    }

    /// Random anchored circle with centre from random stereographic
    /// coordinates and normal `c x v` for a random `v`.
    pub fn anchored(&mut self) -> AnchoredCircle {
        loop {
            let c = sphere_point(Chart::North, &self.rational(), &self.rational());
            let n = c.cross(&self.vec3());
            if let Ok(g) = AnchoredCircle::new(c, n) {
                return g;
            }
        }
    }

    /// Random rational point of `g` other than the origin.
    pub fn point_on(&mut self, g: &AnchoredCircle) -> Vec3 {
        let (e1, e2) = g.plane_basis();
        loop {
            let d = &e1.scale(&self.rational()) + &e2.scale(&self.rational());
            if d.is_zero() {
                continue;
            }
            let x = g.point_along(&d);
            if !x.is_zero() {
                return x;
            }
        }
    }
}

pub fn gen(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let mut s = Sampler::new(spec.seed, spec.magnitude, spec.max_den);
    let (m, n) = (spec.m, spec.n);
    let mut planted = Vec::new();
    let instance = match spec.kind {
        GenKind::RandomTangency => {
            let pts: Vec<DirectedPoint> = (0..m).map(|_| s.directed_point()).collect();
            let circles: Vec<Circle2> = (0..n)
                .map(|j| {
                    if m > 0 && s.rng().gen_bool(spec.density) {
                        let i = s.rng().gen_range(0..m);
                        planted.push((i, j));
                        s.circle_tangent_to(&pts[i])
                    } else {
                        s.circle()
                    }
                })
                .collect();
            Instance {
                points: PointSet::Directed(pts),
                curves: CurveSet::Circles(circles),
            }
        }
        GenKind::Pencil => {
            if m > n || (m == 0 && n > 0) {
                return Err(Error::InfeasibleSpec(format!(
                    "pencil needs 1 <= m <= n to give every pencil point a circle, got m={m}, n={n}"
                )));
            }
            let pts: Vec<DirectedPoint> = (0..m).map(|_| s.directed_point()).collect();
            let circles = (0..n)
                .map(|j| {
                    planted.push((j % m, j));
                    s.circle_tangent_to(&pts[j % m])
                })
                .collect();
            Instance {
                points: PointSet::Directed(pts),
                curves: CurveSet::Circles(circles),
            }
        }
        GenKind::CircleSampled => {
            if n == 0 && m > 0 {
                return Err(Error::InfeasibleSpec("circle-sampled needs n >= 1 when m > 0".into()));
            }
            // circles through a known rational point so samples stay rational
            let mut known = Vec::with_capacity(n);
            let circles: Vec<Circle2> = (0..n)
                .map(|_| loop {
                    let (w, p) = (s.vec2(), s.vec2());
                    if let Ok(c) = Circle2::through(w, &p) {
                        known.push(p);
                        break c;
                    }
                })
                .collect();
            let slope_bound = spec.magnitude.max(2);
            let pts = (0..m)
                .map(|i| {
                    let j = i % n;
                    planted.push((i, j));
                    loop {
                        if let Ok(dp) = tangent_point_sample(&circles[j], &known[j], s.rng(), slope_bound) {
                            break dp;
                        }
                    }
                })
                .collect();
            Instance {
                points: PointSet::Directed(pts),
                curves: CurveSet::Circles(circles),
            }
        }
        GenKind::StGridHorizontalLines => {
            let grid = st_grid(m, n);
            planted = grid.incidences();
            grid.instance()
        }
        GenKind::AnchoredRandom | GenKind::AnchoredPlanted => {
            let circles: Vec<AnchoredCircle> = (0..n).map(|_| s.anchored()).collect();
            let density = if spec.kind == GenKind::AnchoredRandom { 0.0 } else { spec.density };
            if density > 0.0 && n == 0 && m > 0 {
                return Err(Error::InfeasibleSpec("anchored-planted needs n >= 1".into()));
            }
            let planted_points = (density * m as f64).round() as usize;
            let pts = (0..m)
                .map(|i| {
                    if i < planted_points {
                        let j = s.rng().gen_range(0..n);
                        planted.push((i, j));
                        s.point_on(&circles[j])
                    } else {
                        random_ball_point(&mut s)
                    }
                })
                .collect();
            Instance {
                points: PointSet::Space(pts),
                curves: CurveSet::Anchored(circles),
            }
        }
    };
    planted.sort_unstable();
    planted.dedup();
    Ok(Generated {
        spec: spec.clone(),
        instance,
        planted,
    })
}

/// Random nonzero point with `|p| <= 2`, where anchored incidences can occur.
fn random_ball_point(s: &mut Sampler) -> Vec3 {
    let scale = Rational::new(2.into(), s.magnitude.into());
    loop {
        let p = s.vec3().scale(&scale);
        if !p.is_zero() && p.norm2() <= int(4) {
            return p;
        }
    }
}

/// Every planted pair passes the exact predicate.
pub fn certify(g: &Generated) -> Result<bool> {
    Ok(count_pairs(&g.instance, &g.planted)? == g.planted.len())
}

/// Integer grid `{0..cols} x {0..}` (first `m` points, row-major) with the
/// lines `y = s x + t`, `s < slopes`, first `n` in slope-major order, all in
/// the plane `z = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StGrid {
    pub m: usize,
    pub n: usize,
    pub cols: usize,
    pub intercepts: usize,
}

/// Grid sized so that `cols ~ slopes ~ (m n)^(1/6)`, the Szemeredi-Trotter
/// extremal shape for `m = n`.
pub fn st_grid(m: usize, n: usize) -> StGrid {
    let k = ((m.max(1) * n.max(1)) as f64).powf(1.0 / 6.0).round().max(1.0) as usize;
    StGrid {
        m,
        n,
        cols: k,
        intercepts: n.div_ceil(k).max(1),
    }
}

impl StGrid {
    pub fn point(&self, i: usize) -> (i64, i64) {
        ((i % self.cols) as i64, (i / self.cols) as i64)
    }

    pub fn line(&self, j: usize) -> (i64, i64) {
        ((j / self.intercepts) as i64, (j % self.intercepts) as i64)
    }

    pub fn instance(&self) -> Instance {
        let pts = (0..self.m)
            .map(|i| {
                let (x, y) = self.point(i);
                Vec3::from_ints(x, y, 0)
            })
            .collect();
        let lines = (0..self.n)
            .map(|j| {
                let (a, b) = self.line(j);
                HorizontalLine::new(int(a), int(b), Rational::zero())
            })
            .collect();
        Instance {
            points: PointSet::Space(pts),
            curves: CurveSet::HorizontalLines(lines),
        }
    }

    /// Incidences by walking each line across the columns.
    pub fn incidences(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            let (a, b) = self.line(j);
            for x in 0..self.cols as i64 {
                let y = a * x + b;
                let i = y as usize * self.cols + x as usize;
                if y >= 0 && i < self.m {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Incidences by the direct double loop over all pairs.
    pub fn incidences_brute(&self) -> usize {
        let mut total = 0;
        for i in 0..self.m {
            let (x, y) = self.point(i);
            for j in 0..self.n {
                let (a, b) = self.line(j);
                if y == a * x + b {
                    total += 1;
                }
            }
        }
        total
    }
}

/// Variables of the horizontal-line eliminant, in order.
pub const FSTAR_VARS: [&str; 8] = ["t1", "t2", "a1", "b1", "c1", "a2", "b2", "c2"];

/// Eliminates the parameters from the meeting conditions of the lines
/// `(t1, a1 t1 + b1, c1)` and `(t2, a2 t2 + b2, c2)`: `t2` from the pairs
/// (x, y) and (x, z), then `t1` from the two results.
pub fn horizontal_line_fstar() -> Poly<8> {
    let v = |i| Poly::<8>::var(i);
    let ex = &v(0) - &v(1);
    let ey = &(&(&v(2) * &v(0)) + &v(3)) - &(&(&v(5) * &v(1)) + &v(6));
    let ez = &v(4) - &v(7);
    let r_xy = resultant(&ex, &ey, 1).expect("ex has degree 1 in t2");
    let r_xz = resultant(&ex, &ez, 1).expect("ex has degree 1 in t2");
    resultant(&r_xy, &r_xz, 0).expect("r_xy has degree 1 in t1 generically")
}

/// `F*` at a pair of lines given as `(a, b, c)`.
pub fn fstar_eval(fstar: &Poly<8>, l1: &HorizontalLine, l2: &HorizontalLine) -> Rational {
    let zero = Rational::zero();
    fstar.eval(&[
        zero.clone(),
        zero,
        l1.a.clone(),
        l1.b.clone(),
        l1.c.clone(),
        l2.a.clone(),
        l2.b.clone(),
        l2.c.clone(),
    ])
}

/// Whether two horizontal lines share a point.
pub fn horizontal_lines_meet(l1: &HorizontalLine, l2: &HorizontalLine) -> bool {
    l1.c == l2.c && (l1.a != l2.a || l1.b == l2.b)
}
