//! Rational space curves and restriction of trivariate polynomials to them.

use num_traits::Zero;

use super::{Rational, TriPoly, UniPoly, Vec3};

/// Ratio of two univariate polynomials in the curve parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl RatFn {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        Self { num, den }
    }

    pub fn poly(num: UniPoly) -> Self {
        Self::new(num, UniPoly::one())
    }

    pub fn eval(&self, s: &Rational) -> Option<Rational> {
        let d = self.den.eval(s);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(s) / d)
        }
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.num.eval_f64(s) / self.den.eval_f64(s)
    }
}

/// Curve `s -> (x(s), y(s), z(s))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCurve {
    pub x: RatFn,
    pub y: RatFn,
    pub z: RatFn,
}

impl RationalCurve {
    pub fn new(x: RatFn, y: RatFn, z: RatFn) -> Self {
        Self { x, y, z }
    }

    pub fn components(&self) -> [&RatFn; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Point at parameter `s`, or `None` where a denominator vanishes.
    pub fn point_at(&self, s: &Rational) -> Option<Vec3> {
        Some(Vec3::new(self.x.eval(s)?, self.y.eval(s)?, self.z.eval(s)?))
    }

    pub fn point_at_f64(&self, s: f64) -> [f64; 3] {
        [self.x.eval_f64(s), self.y.eval_f64(s), self.z.eval_f64(s)]
    }

    pub fn denominator_product(&self) -> UniPoly {
        &(&self.x.den * &self.y.den) * &self.z.den
    }
}

/// Numerator of `f(x(s), y(s), z(s))` after multiplying through by
/// `den_x^dx * den_y^dy * den_z^dz`, where `dx, dy, dz` are the degrees of
/// `f` in each variable. Its real roots away from denominator zeros are the
/// parameters where `f` vanishes on the curve.
pub fn restrict_to_curve(f: &TriPoly, curve: &RationalCurve) -> UniPoly {
    let comps = curve.components();
    let degs = [f.degree_in(0), f.degree_in(1), f.degree_in(2)];
    let powers: Vec<(Vec<UniPoly>, Vec<UniPoly>)> = comps
        .iter()
        .zip(degs)
        .map(|(c, d)| {
            let mut nums = vec![UniPoly::one()];
            let mut dens = vec![UniPoly::one()];
            for k in 1..=d as usize {
                nums.push(&nums[k - 1] * &c.num);
                dens.push(&dens[k - 1] * &c.den);
            }
            (nums, dens)
        })
        .collect();
    let mut acc = UniPoly::zero();
    for (e, c) in f.terms() {
        let mut term = UniPoly::constant(c.clone());
        for v in 0..3 {
            let k = e[v] as usize;
            let (nums, dens) = &powers[v];
            term = &term * &nums[k];
            term = &term * &dens[degs[v] as usize - k];
        }
        acc = &acc + &term;
    }
    acc
}

/// `restrict_to_curve` with every root shared with a denominator divided
/// out, so that each remaining real root is a genuine affine curve point.
/// The zero polynomial is returned unchanged (curve contained in `Z(f)`).
pub fn restrict_to_affine_curve(f: &TriPoly, curve: &RationalCurve) -> UniPoly {
    let mut r = restrict_to_curve(f, curve);
    if r.is_zero() {
        return r;
    }
    let dens = curve.denominator_product();
    loop {
        let g = r.gcd(&dens);
        if g.degree().map_or(true, |d| d == 0) {
            return r;
        }
        r = r.div_rem(&g).0;
    }
}
