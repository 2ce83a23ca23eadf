//! Sparse multivariate polynomials in a fixed number of variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, to_f64, Q};
use super::{Rational, UniPoly};
use crate::error::{Error, Result};

/// Exponent vector; ordering of the map is lexicographic in these.
pub type Exponent<const N: usize> = [u32; N];

/// Polynomial in `N` variables with rational coefficients. No stored
/// coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<Exponent<N>, Rational>,
}

/// Trivariate polynomial in `(x, y, z)`.
pub type TriPoly = Poly<3>;

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::term([0; N], c)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn term(exp: Exponent<N>, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// The coordinate function of variable `i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::term(e, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent<N>, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent<N>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent<N>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &Exponent<N>) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, point: &[Rational; N]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in point.iter().zip(e.iter()) {
                for _ in 0..k {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64; N]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point.iter())
                    .fold(to_f64(c), |t, (&k, &v)| t * v.powi(k as i32))
            })
            .sum()
    }

    /// Replaces variable `var` by the constant `value`.
    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = std::mem::replace(&mut e2[var], 0);
            let mut t = c.clone();
            for _ in 0..k {
                t *= value;
            }
            out.add_term(e2, t);
        }
        out
    }

    /// Coefficients with respect to `var`, ascending; each is free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly<N>> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = std::mem::replace(&mut e2[var], 0) as usize;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Univariate view when only `var` appears.
    pub fn to_univariate(&self, var: usize) -> Option<UniPoly> {
        let mut coeffs = vec![Rational::zero(); self.degree_in(var) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != var && k != 0) {
                return None;
            }
            coeffs[e[var] as usize] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }

    fn leading(&self) -> Option<(&Exponent<N>, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, failing when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly<N>) -> Result<Poly<N>> {
        let (de, dc) = d.leading().ok_or(Error::InexactDivision)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((re, rc)) = rem.leading() {
            let mut qe = [0u32; N];
            for i in 0..N {
                if re[i] < de[i] {
                    return Err(Error::InexactDivision);
                }
                qe[i] = re[i] - de[i];
            }
            let qc = rc / dc;
            let step = Poly::term(qe, qc.clone());
            rem = &rem - &(&step * d);
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }
}

impl<const N: usize> fmt::Display for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("v{i}") } else { format!("v{i}^{k}") })
                    .collect();
                if mono.is_empty() {
                    format_rational(c)
                } else {
                    format!("({})*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a, const N: usize> Add<&'a Poly<N>> for &'a Poly<N> {
    type Output = Poly<N>;
    fn add(self, o: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a, const N: usize> Sub<&'a Poly<N>> for &'a Poly<N> {
    type Output = Poly<N>;
    fn sub(self, o: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl<'a, const N: usize> Mul<&'a Poly<N>> for &'a Poly<N> {
    type Output = Poly<N>;
    fn mul(self, o: &Poly<N>) -> Poly<N> {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let mut e = *ea;
                for i in 0..N {
                    e[i] += eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

fn exponent_key<const N: usize>(e: &Exponent<N>) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_exponent<const N: usize>(s: &str) -> Option<Exponent<N>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return None;
    }
    let mut e = [0u32; N];
    for (slot, p) in e.iter_mut().zip(parts) {
        *slot = p.trim().parse().ok()?;
    }
    Some(e)
}

/// JSON form: an object mapping `"i,j,k"` exponent keys to rational strings.
impl<const N: usize> Serialize for Poly<N> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            m.serialize_entry(&exponent_key(e), &format_rational(c))?;
        }
        m.end()
    }
}

impl<'de, const N: usize> Deserialize<'de> for Poly<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, Q>::deserialize(d)?;
        let mut p = Poly::zero();
        for (k, Q(c)) in raw {
            let e = parse_exponent::<N>(&k)
                .ok_or_else(|| de::Error::custom(format!("bad exponent key {k:?}")))?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::{int, rat};

    fn x() -> TriPoly {
        TriPoly::var(0)
    }
    fn y() -> TriPoly {
        TriPoly::var(1)
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = &(&x() * &x()) - &(&y() * &TriPoly::constant(int(3)));
        assert_eq!(p.eval(&[int(2), int(1), int(0)]), int(1));
        assert_eq!(p.total_degree(), 2);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &x() + &y();
        let b = &x() - &TriPoly::constant(rat(1, 2));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&TriPoly::var(2)), Err(Error::InexactDivision));
    }

    #[test]
    fn coefficients_in_a_variable() {
        // x^2 y + 3 x + y
        let p = &(&(&(&x() * &x()) * &y()) + &x().scale(&int(3))) + &y();
        let cs = p.coefficients_in(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], y());
        assert_eq!(cs[1], TriPoly::constant(int(3)));
        assert_eq!(cs[2], y());
    }

    #[test]
    fn json_round_trip() {
        let p = &(&x() * &y()).scale(&rat(-2, 3)) + &TriPoly::constant(int(1));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"0,0,0":"1","1,1,0":"-2/3"}"#);
        assert_eq!(serde_json::from_str::<TriPoly>(&s).unwrap(), p);
    }
}
