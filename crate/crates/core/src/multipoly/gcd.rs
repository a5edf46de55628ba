//! Multivariate gcd by recursion on the last variable: split off the content
//! with respect to that variable, run a primitive pseudo-remainder sequence on
//! the primitive parts, and recombine. Before recursing, the monomial content
//! is removed and every variable whose exponents share a common factor `g` is
//! deflated by `x -> x^(1/g)`; both operations commute with taking gcds.

use std::collections::BTreeMap;

use super::{Monomial, MultiPoly};
use crate::error::{Error, Result};
use crate::fqtower::dense;

pub(super) fn gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    let nvars = a.nvars.max(b.nvars);
    let g = match (a.is_zero(), b.is_zero()) {
        (true, true) => return Err(Error::GcdOfZeros),
        (true, false) => b.monic(),
        (false, true) => a.monic(),
        (false, false) => nonzero_gcd(a, b),
    };
    Ok(g.with_nvars(nvars))
}

/// Monic gcd of two nonzero polynomials.
fn nonzero_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let k = a.field;
    let nvars = a.nvars.max(b.nvars);
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(k, nvars);
    }
    if a == b {
        return a.monic();
    }
    let ma = monomial_content(a);
    let mb = monomial_content(b);
    let shared = ma.gcd(&mb);
    let a = divide_monomial(a, &ma);
    let b = divide_monomial(b, &mb);

    let width = a
        .terms
        .iter()
        .chain(&b.terms)
        .map(|(m, _)| m.width())
        .max()
        .unwrap_or(0);
    let factors: Vec<u64> = (0..width)
        .map(|i| {
            let g = a
                .terms
                .iter()
                .chain(&b.terms)
                .fold(0u64, |g, (m, _)| gcd_u64(g, m.exponent(i)));
            g.max(1)
        })
        .collect();
    let deflated = factors.iter().any(|&f| f > 1);
    let (a, b) = if deflated {
        (reshape(&a, &factors, false), reshape(&b, &factors, false))
    } else {
        (a, b)
    };

    let mut g = primitive_gcd(&a, &b);
    if deflated {
        g = reshape(&g, &factors, true);
    }
    g.mul_term(&shared, 1).monic().with_nvars(nvars)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn monomial_content(a: &MultiPoly) -> Monomial {
    let mut it = a.terms.iter().map(|(m, _)| m);
    let first = it.next().cloned().unwrap_or_default();
    it.fold(first, |acc, m| acc.gcd(m))
}

fn divide_monomial(a: &MultiPoly, m: &Monomial) -> MultiPoly {
    if m.is_one() {
        return a.clone();
    }
    let terms = a
        .terms
        .iter()
        .map(|(t, c)| (m.quotient_of(t), *c))
        .collect();
    MultiPoly::from_sorted(a.field, a.nvars, terms)
}

/// Divides (or multiplies, when `inflate`) each variable's exponents by its
/// factor.
fn reshape(a: &MultiPoly, factors: &[u64], inflate: bool) -> MultiPoly {
    let terms = a
        .terms
        .iter()
        .map(|(m, c)| {
            let v = m
                .exponents()
                .iter()
                .zip(factors)
                .map(|(&e, &f)| if inflate { e * f } else { e / f })
                .collect();
            (Monomial::new(v), *c)
        })
        .collect();
    MultiPoly::from_terms(a.field, a.nvars, terms)
}

/// Coefficients of `a` viewed as a polynomial in variable `v`, keyed by the
/// power of `v`.
fn coefficients_in(a: &MultiPoly, v: usize) -> BTreeMap<u64, MultiPoly> {
    let mut buckets: BTreeMap<u64, Vec<(Monomial, u32)>> = BTreeMap::new();
    for (m, c) in &a.terms {
        let e = m.exponent(v);
        let mut exps = m.exponents().to_vec();
        if e > 0 {
            exps[v] = 0;
        }
        buckets
            .entry(e)
            .or_default()
            .push((Monomial::new(exps), *c));
    }
    buckets
        .into_iter()
        .map(|(e, terms)| {
            // removing one variable from every term keeps the relative order
            (e, MultiPoly::from_sorted(a.field, a.nvars, terms))
        })
        .collect()
}

fn leading_coeff_in(a: &MultiPoly, v: usize) -> (u64, MultiPoly) {
    coefficients_in(a, v)
        .into_iter()
        .next_back()
        .expect("nonzero polynomial")
}

/// Content with respect to `v`: gcd of the coefficients, made monic.
fn content_in(a: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs = coefficients_in(a, v).into_values();
    let mut acc = coeffs.next().expect("nonzero polynomial").monic();
    for c in coeffs {
        if acc.is_constant() {
            break;
        }
        acc = nonzero_gcd(&acc, &c);
    }
    acc
}

fn primitive_part_in(a: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(a, v);
    if c.is_one() {
        a.clone()
    } else {
        a.exact_div(&c).expect("content divides its polynomial")
    }
}

fn main_variable(a: &MultiPoly, b: &MultiPoly) -> Option<usize> {
    a.support().into_iter().chain(b.support()).max()
}

fn primitive_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let k = a.field;
    let nvars = a.nvars.max(b.nvars);
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(k, nvars);
    }
    let v = main_variable(a, b).expect("nonconstant input");
    let (sa, sb) = (a.support(), b.support());
    if sa == [v] && sb == [v] {
        return univariate_gcd(a, b, v);
    }
    let (da, db) = (a.degree_in(v).unwrap_or(0), b.degree_in(v).unwrap_or(0));
    if da == 0 {
        return nonzero_gcd(a, &content_in(b, v));
    }
    if db == 0 {
        return nonzero_gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let content = nonzero_gcd(&ca, &cb);
    let pa = if ca.is_one() {
        a.clone()
    } else {
        a.exact_div(&ca).expect("content divides")
    };
    let pb = if cb.is_one() {
        b.clone()
    } else {
        b.exact_div(&cb).expect("content divides")
    };
    let g = if pa.support() == [v] && pb.support() == [v] {
        univariate_gcd(&pa, &pb, v)
    } else {
        primitive_prs(pa, pb, v)
    };
    g.mul(&content)
}

/// Euclid over `Z_p` for polynomials in the single variable `v`.
fn univariate_gcd(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let k = a.field;
    let to_dense = |p: &MultiPoly| {
        let mut d = vec![0u32; p.degree_in(v).unwrap_or(0) as usize + 1];
        for (m, c) in &p.terms {
            d[m.exponent(v) as usize] = *c;
        }
        d
    };
    let g = dense::gcd(k, &to_dense(a), &to_dense(b));
    let terms = g
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(e, &c)| (Monomial::var(v, e as u64), c))
        .collect();
    MultiPoly::from_terms(k, a.nvars.max(b.nvars), terms)
}

/// Primitive PRS on polynomials primitive with respect to `v`.
fn primitive_prs(a: MultiPoly, b: MultiPoly, v: usize) -> MultiPoly {
    let deg = |p: &MultiPoly| p.degree_in(v).unwrap_or(0);
    let (mut r0, mut r1) = if deg(&a) >= deg(&b) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_remainder(&r0, &r1, v);
        if r.is_zero() {
            return r1;
        }
        if deg(&r) == 0 {
            return MultiPoly::one(r.field, r.nvars);
        }
        r0 = r1;
        r1 = primitive_part_in(&r, v);
    }
}

fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let (db, lcb) = leading_coeff_in(b, v);
    let mut r = a.clone();
    while !r.is_zero() {
        let (dr, lcr) = leading_coeff_in(&r, v);
        if dr < db {
            break;
        }
        let shifted = b.mul(&lcr).mul_term(&Monomial::var(v, dr - db), 1);
        r = r.mul(&lcb).sub(&shifted);
    }
    r
}
