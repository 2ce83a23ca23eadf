//! Sylvester resultants with fraction-free determinant evaluation.
//!
//! The resultant of `p` and `q` with respect to a variable vanishes at a
//! specialization of the remaining variables whenever the specialized
//! polynomials share a root. The converse holds as long as at least one
//! of the two leading coefficients survives the specialization; when both
//! vanish the resultant is zero regardless.

use num_traits::Zero;

use super::{Poly, Rational, UniPoly};
use crate::error::{Error, Result};

/// Builds the Sylvester matrix of `p` (degree `m`) and `q` (degree `n`),
/// given ascending coefficient lists.
fn sylvester<T: Clone>(p: &[T], q: &[T], zero: &T) -> Vec<Vec<T>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Bareiss fraction-free determinant over a polynomial ring.
fn bareiss<const N: usize>(mut m: Vec<Vec<Poly<N>>>) -> Result<Poly<N>> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Poly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev)?;
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Resultant of `p` and `q` with respect to variable `var`.
pub fn resultant<const N: usize>(p: &Poly<N>, q: &Poly<N>, var: usize) -> Result<Poly<N>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pc = p.coefficients_in(var);
    let qc = q.coefficients_in(var);
    if pc.len() == 1 && qc.len() == 1 {
        return Err(Error::ConstantResultant);
    }
    bareiss(sylvester(&pc, &qc, &Poly::zero()))
}

/// Resultant of two univariate rational polynomials.
pub fn resultant_uni(p: &UniPoly, q: &UniPoly) -> Result<Rational> {
    let lift = |u: &UniPoly| -> Poly<1> {
        Poly::from_terms(u.coeffs().iter().enumerate().map(|(i, c)| ([i as u32], c.clone())))
    };
    let r = resultant(&lift(p), &lift(q), 0)?;
    Ok(r.coefficient(&[0]))
}

/// True when the leading coefficients of both inputs (in `var`) vanish at the
/// specialization, which is the locus where a zero resultant carries no
/// information.
pub fn degenerate_at<const N: usize>(
    p: &Poly<N>,
    q: &Poly<N>,
    var: usize,
    point: &[Rational; N],
) -> bool {
    let lead = |f: &Poly<N>| f.coefficients_in(var).last().cloned().unwrap_or_else(Poly::zero);
    lead(p).eval(point).is_zero() && lead(q).eval(point).is_zero()
}
