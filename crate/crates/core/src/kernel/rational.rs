//! Exact scalars and small fixed-size vectors over them.
//!
//! Every coordinate in the crate is a [`Rational`], i.e. a reduced fraction of
//! big integers with a positive denominator. On the wire a rational is the
//! string `"num/den"`, with the denominator omitted when it is one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Nearest `f64`; overflow saturates to infinity.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Serde adapter for a single rational field stored as `"num/den"`.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = RatLiteral::deserialize(d)?;
        raw.into_rational().map_err(de::Error::custom)
    }
}

/// Accepts either a string literal or a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatLiteral {
    Str(String),
    Int(i64),
}

impl RatLiteral {
    fn into_rational(self) -> Result<Rational> {
        match self {
            RatLiteral::Str(s) => parse_rational(&s),
            RatLiteral::Int(i) => Ok(int(i)),
        }
    }
}

/// Newtype used where a rational must be serialized inside a collection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_str::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_str::deserialize(d).map(Q)
    }
}

fn serialize_coords<S: Serializer>(coords: &[&Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(coords.len()))?;
    for q in coords {
        seq.serialize_element(&format_rational(q))?;
    }
    seq.end()
}

struct CoordsVisitor(usize);

impl<'de> Visitor<'de> for CoordsVisitor {
    type Value = Vec<Rational>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an array of {} rational literals", self.0)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
        let mut out = Vec::with_capacity(self.0);
        while let Some(Q(q)) = seq.next_element::<Q>()? {
            out.push(q);
        }
        if out.len() != self.0 {
            return Err(de::Error::invalid_length(out.len(), &self));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: Rational,
    pub y: Rational,
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(int(x), int(y))
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn dot(&self, o: &Vec2) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, o: &Vec2) -> Rational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn scale(&self, k: &Rational) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [to_f64(&self.x), to_f64(&self.y)]
    }
}

impl<'a> Add<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl Serialize for Vec2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_coords(&[&self.x, &self.y], s)
    }
}

impl<'de> Deserialize<'de> for Vec2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut v = d.deserialize_seq(CoordsVisitor(2))?;
        let y = v.pop().unwrap();
        let x = v.pop().unwrap();
        Ok(Vec2::new(x, y))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec3 {
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Vec3 {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Self { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Self::new(int(x), int(y), int(z))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn dot(&self, o: &Vec3) -> Rational {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn scale(&self, k: &Rational) -> Vec3 {
        Vec3::new(&self.x * k, &self.y * k, &self.z * k)
    }

    pub fn coords(&self) -> [&Rational; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [to_f64(&self.x), to_f64(&self.y), to_f64(&self.z)]
    }

    /// Scales to a primitive integer vector whose first nonzero entry is positive.
    /// The zero vector is returned unchanged.
    pub fn primitive(&self) -> Vec3 {
        if self.is_zero() {
            return self.clone();
        }
        let den = common_denominator(self.coords());
        let ints: Vec<BigInt> = self
            .coords()
            .iter()
            .map(|q| (*q * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        let lead_negative = ints.iter().find(|v| !v.is_zero()).map_or(false, |v| v.is_negative());
        let g = if lead_negative { -g } else { g };
        let mut it = ints.into_iter().map(|v| Rational::from_integer(v / &g));
        Vec3::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
    }
}

impl<'a> Add<&'a Vec3> for &'a Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl<'a> Sub<&'a Vec3> for &'a Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl<'a> Mul<&'a Rational> for &'a Vec3 {
    type Output = Vec3;
    fn mul(self, k: &Rational) -> Vec3 {
        self.scale(k)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            format_rational(&self.x),
            format_rational(&self.y),
            format_rational(&self.z)
        )
    }
}

impl Serialize for Vec3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_coords(&[&self.x, &self.y, &self.z], s)
    }
}

impl<'de> Deserialize<'de> for Vec3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut v = d.deserialize_seq(CoordsVisitor(3))?;
        let z = v.pop().unwrap();
        let y = v.pop().unwrap();
        let x = v.pop().unwrap();
        Ok(Vec3::new(x, y, z))
    }
}

/// Determinant of the 3x3 matrix with the given rows.
pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> Rational {
    a.dot(&b.cross(c))
}
