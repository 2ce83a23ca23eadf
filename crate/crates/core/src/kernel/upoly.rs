//! Univariate polynomials over the rationals and exact real-root counting.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{common_denominator, format_rational, to_f64, Q};
use super::Rational;
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `t - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + to_f64(c))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / lc;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let ints = self.integer_coeffs();
        Self::new(ints.into_iter().map(Rational::from_integer).collect())
    }

    /// Coefficients of the primitive positive multiple, as integers.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let den = Rational::from_integer(common_denominator(&self.coeffs));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        ints.into_iter().map(|v| v / &g).collect()
    }

    /// Product of the distinct irreducible factors, up to a positive scalar.
    pub fn square_free(&self) -> UniPoly {
        if self.degree().map_or(true, |d| d == 0) {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.primitive()
    }

    /// Number of distinct real roots strictly inside `interval`.
    pub fn sturm_count(&self, interval: &Interval) -> Result<usize> {
        let chain = SturmChain::new(self)?;
        Ok(chain.count(interval))
    }

    /// Number of distinct real roots.
    pub fn real_root_count(&self) -> Result<usize> {
        self.sturm_count(&Interval::real_line())
    }

    /// Disjoint isolating intervals, in increasing order, one per distinct
    /// real root. A degenerate interval `(r, r)` is an exact rational root;
    /// otherwise the root lies strictly inside the open interval.
    pub fn isolate_real_roots(&self) -> Result<Vec<(Rational, Rational)>> {
        let chain = SturmChain::new(self)?;
        let bound = chain.root_bound();
        let mut out = Vec::new();
        let total = chain.count(&Interval::real_line());
        chain.isolate(-bound.clone(), bound, total, &mut out);
        Ok(out)
    }

    /// Sturm sign variations of the square-free part at each endpoint.
    /// `V(a) - V(b)` counts the distinct roots in `(a, b]`.
    pub fn sturm_variations(&self, at: &[Endpoint]) -> Result<Vec<usize>> {
        let chain = SturmChain::new(self)?;
        Ok(at.iter().map(|x| SturmChain::variations(&chain.signs_at(x))).collect())
    }
}

/// Pairwise coprime square-free polynomials with the same real and complex
/// roots as the union of the inputs. Constants are dropped.
pub fn coprime_basis(polys: &[UniPoly]) -> Vec<UniPoly> {
    let positive = |p: &UniPoly| p.degree().is_some_and(|d| d > 0);
    let mut work: Vec<UniPoly> = polys.iter().filter(|p| positive(p)).map(|p| p.square_free()).collect();
    let mut basis: Vec<UniPoly> = Vec::new();
    while let Some(mut p) = work.pop() {
        let mut i = 0;
        while i < basis.len() && positive(&p) {
            let g = p.gcd(&basis[i]);
            if positive(&g) {
                let b = basis.swap_remove(i);
                let rest = b.div_rem(&g).0;
                if positive(&rest) {
                    work.push(rest.primitive());
                }
                p = p.div_rem(&g).0.primitive();
                work.push(g.primitive());
            } else {
                i += 1;
            }
        }
        if positive(&p) {
            basis.push(p);
        }
    }
    basis
}

/// Sorted, pairwise disjoint isolating intervals for every distinct real
/// root of the union of `polys`, in the format of `isolate_real_roots`.
/// Open intervals never end at a degenerate neighbour, so midpoints of the
/// gaps avoid every root.
pub fn isolate_union(polys: &[UniPoly]) -> Result<Vec<(Rational, Rational)>> {
    let basis = coprime_basis(polys);
    let chains: Vec<SturmChain> = basis.iter().map(SturmChain::new).collect::<Result<_>>()?;
    let mut roots: Vec<(Rational, Rational, usize)> = Vec::new();
    for (k, p) in basis.iter().enumerate() {
        roots.extend(p.isolate_real_roots()?.into_iter().map(|(a, b)| (a, b, k)));
    }
    let overlaps = |x: &(Rational, Rational, usize), y: &(Rational, Rational, usize)| {
        let (lo, hi) = (x.0.clone().max(y.0.clone()), x.1.clone().min(y.1.clone()));
        let degenerate = x.0 == x.1 || y.0 == y.1;
        if degenerate {
            // a point inside, or on the end of, the other interval
            lo <= hi && !(x.0 == x.1 && y.0 == y.1)
        } else {
            lo < hi
        }
    };
    loop {
        roots.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
        let hit = (0..roots.len()).find_map(|i| {
            (i + 1..roots.len())
                .take_while(|&j| roots[j].0 <= roots[i].1)
                .find(|&j| overlaps(&roots[i], &roots[j]))
                .map(|j| (i, j))
        });
        let Some((i, j)) = hit else { break };
        // shrink the wider open interval of the pair
        let wi = &roots[i].1 - &roots[i].0;
        let wj = &roots[j].1 - &roots[j].0;
        let k = if wi >= wj { i } else { j };
        let (lo, hi, owner) = roots[k].clone();
        roots[k] = chains[owner].halve(lo, hi);
        roots[k].2 = owner;
    }
    Ok(roots.into_iter().map(|(a, b, _)| (a, b)).collect())
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})*t", format_rational(c)),
                _ => format!("({})*t^{}", format_rational(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Q> = self.coeffs.iter().cloned().map(Q).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Q>::deserialize(d)?;
        Ok(UniPoly::new(v.into_iter().map(|q| q.0).collect()))
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        self + &(-o)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// One end of a root-counting interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

/// Open interval `(lo, hi)`; empty when `lo >= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self {
            lo: Endpoint::Finite(lo),
            hi: Endpoint::Finite(hi),
        }
    }

    pub fn real_line() -> Self {
        Self {
            lo: Endpoint::NegInfinity,
            hi: Endpoint::PosInfinity,
        }
    }

    fn is_empty(&self) -> bool {
        use Endpoint::*;
        match (&self.lo, &self.hi) {
            (PosInfinity, _) | (_, NegInfinity) => true,
            (Finite(a), Finite(b)) => a >= b,
            _ => false,
        }
    }
}

/// Sturm chain of the square-free part, stored with primitive integer
/// coefficients (each member rescaled by a positive content).
struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

fn sign(v: &BigInt) -> i8 {
    match v.cmp(&BigInt::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Sign of an integer polynomial at `num/den` with `den > 0`.
fn sign_at(coeffs: &[BigInt], num: &BigInt, den: &BigInt) -> i8 {
    // homogeneous Horner: den^deg * p(num/den)
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    sign(&acc)
}

impl SturmChain {
    fn new(p: &UniPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = p.square_free();
        let mut polys = vec![g.primitive()];
        let d = g.derivative();
        if !d.is_zero() {
            polys.push(d.primitive());
            loop {
                let n = polys.len();
                let r = polys[n - 2].div_rem(&polys[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                polys.push((-&r).primitive());
            }
        }
        Ok(Self {
            chain: polys.iter().map(UniPoly::integer_coeffs).collect(),
        })
    }

    fn signs_at(&self, x: &Endpoint) -> Vec<i8> {
        self.chain
            .iter()
            .map(|c| {
                let lc = sign(c.last().unwrap());
                let deg = c.len() - 1;
                match x {
                    Endpoint::PosInfinity => lc,
                    Endpoint::NegInfinity => {
                        if deg % 2 == 0 {
                            lc
                        } else {
                            -lc
                        }
                    }
                    Endpoint::Finite(q) => sign_at(c, q.numer(), q.denom()),
                }
            })
            .collect()
    }

    fn variations(signs: &[i8]) -> usize {
        let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn count(&self, interval: &Interval) -> usize {
        if interval.is_empty() || self.chain[0].len() == 1 {
            return 0;
        }
        let lo = self.signs_at(&interval.lo);
        let hi = self.signs_at(&interval.hi);
        // For a square-free chain V(a) - V(b) counts roots in (a, b].
        let hi_is_root = hi[0] == 0;
        Self::variations(&lo) - Self::variations(&hi) - usize::from(hi_is_root)
    }

    /// Power of two above every root modulus (Fujiwara's bound), so that
    /// bisection points stay dyadic.
    fn root_bound(&self) -> Rational {
        let c = &self.chain[0];
        let n = c.len() - 1;
        let lead_bits = c[n].bits() as i64 - 1;
        let exp = (1..=n)
            .filter(|&k| !c[n - k].is_zero())
            .map(|k| {
                let num = c[n - k].bits() as i64 - lead_bits;
                -((-num).div_euclid(k as i64))
            })
            .max()
            .unwrap_or(0)
            + 2;
        Rational::from_integer(BigInt::from(2)).pow(exp as i32)
    }

    /// The half of `(lo, hi)` holding its single root, or the degenerate
    /// interval at the midpoint when that is the root.
    fn halve(&self, lo: Rational, hi: Rational) -> (Rational, Rational, usize) {
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        if self.is_root(&mid) {
            (mid.clone(), mid, 0)
        } else if self.count(&Interval::open(lo.clone(), mid.clone())) == 1 {
            (lo, mid, 0)
        } else {
            (mid, hi, 0)
        }
    }

    fn is_root(&self, q: &Rational) -> bool {
        sign_at(&self.chain[0], q.numer(), q.denom()) == 0
    }

    fn isolate(&self, lo: Rational, hi: Rational, count: usize, out: &mut Vec<(Rational, Rational)>) {
        match count {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
                let left = self.count(&Interval::open(lo.clone(), mid.clone()));
                let at_mid = self.is_root(&mid);
                self.isolate(lo, mid.clone(), left, out);
                if at_mid {
                    out.push((mid.clone(), mid.clone()));
                }
                let right = count - left - usize::from(at_mid);
                self.isolate(mid, hi, right, out);
            }
        }
    }
}
