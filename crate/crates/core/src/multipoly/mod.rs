//! Sparse multivariate polynomials over `Z_p`.
//!
//! Terms are kept sorted in descending graded-lexicographic order with no
//! zero coefficients, so structural equality is polynomial equality and the
//! first term is the leading term.

mod gcd;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fqtower::FqElem;
use crate::primefield::{PrimeField, PrimeFieldElem};

/// Exponent vector with trailing zeros stripped, so equal monomials compare
/// equal regardless of how many variables were in scope when they were built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u64>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(i: usize, e: u64) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::new(v)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of variable slots needed to hold this monomial.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n)
            .map(|i| self.exponent(i) + other.exponent(i))
            .collect();
        Monomial::new(v)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming [`Monomial::divides`].
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let v = (0..other.0.len())
            .map(|i| other.exponent(i) - self.exponent(i))
            .collect();
        Monomial::new(v)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        Monomial::new((0..n).map(|i| self.0[i].min(other.0[i])).collect())
    }

    fn map_exponents(&self, f: impl Fn(u64) -> Option<u64>) -> Option<Monomial> {
        let v: Option<Vec<u64>> = self.0.iter().map(|&e| f(e)).collect();
        v.map(Monomial::new)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, ties broken by the first
    /// differing exponent with `x1 > x2 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let n = self.0.len().max(other.0.len());
                (0..n)
                    .map(|i| self.exponent(i).cmp(&other.exponent(i)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `x1..x_nvars` over `Z_p`.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    /// Descending graded-lex order, nonzero coefficients.
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl std::hash::Hash for MultiPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.terms.hash(state);
    }
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: i64) -> Self {
        Self::from_terms(field, nvars, vec![(Monomial::one(), field.reduce(c))])
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::VariableOutOfRange { index: i, nvars });
        }
        Ok(Self::from_terms(
            field,
            nvars,
            vec![(Monomial::var(i, 1), 1)],
        ))
    }

    pub fn monomial(field: PrimeField, nvars: usize, m: Monomial, c: u32) -> Self {
        Self::from_terms(field, nvars, vec![(m, c)])
    }

    /// Collects like terms, drops zeros, and sorts. Coefficients are reduced
    /// mod `p`; `nvars` grows to cover every monomial.
    pub fn from_terms(field: PrimeField, nvars: usize, terms: Vec<(Monomial, u32)>) -> Self {
        let mut acc: HashMap<Monomial, u32> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            let c = c % field.p();
            let slot = acc.entry(m).or_insert(0);
            *slot = field.add(*slot, c);
        }
        Self::from_map(field, nvars, acc)
    }

    fn from_map(field: PrimeField, nvars: usize, acc: HashMap<Monomial, u32>) -> Self {
        let mut terms: Vec<(Monomial, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let nvars = terms.iter().map(|(m, _)| m.width()).fold(nvars, usize::max);
        MultiPoly {
            field,
            nvars,
            terms,
        }
    }

    /// Caller guarantees sorted, nonzero, combined terms.
    fn from_sorted(field: PrimeField, nvars: usize, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| *c != 0));
        MultiPoly {
            field,
            nvars,
            terms,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same polynomial with at least `nvars` variables in scope.
    pub fn with_nvars(mut self, nvars: usize) -> Self {
        self.nvars = self.nvars.max(nvars);
        self
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    /// Constant term value when the polynomial is constant.
    pub fn constant_value(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, u32)> {
        self.terms.first().map(|(m, c)| (m, *c))
    }

    pub fn leading_coeff(&self) -> Option<PrimeFieldElem> {
        self.terms.first().map(|(_, c)| self.field.elem(*c as i64))
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.first().map(|(m, _)| m.total_degree())
    }

    /// Degree in variable `i`; `None` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.exponent(i)).max()
    }

    pub fn max_exponent(&self) -> u64 {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.exponents().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Indices of variables that occur with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        let width = self.terms.iter().map(|(m, _)| m.width()).max().unwrap_or(0);
        (0..width)
            .filter(|&i| self.terms.iter().any(|(m, _)| m.exponent(i) > 0))
            .collect()
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.field, other.field,
            "polynomials over different prime fields"
        );
    }

    pub fn neg(&self) -> Self {
        let k = self.field;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), k.neg(*c)))
            .collect();
        Self::from_sorted(k, self.nvars, terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        self.check(other);
        let k = self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let rhs = |c: u32| if negate { k.neg(c) } else { c };
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), *ca));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), rhs(*cb)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = k.add(*ca, rhs(*cb));
                    if c != 0 {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), rhs(*c))));
        Self::from_sorted(k, self.nvars.max(other.nvars), out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let k = self.field;
        let nvars = self.nvars.max(other.nvars);
        if self.is_zero() || other.is_zero() {
            return Self::zero(k, nvars);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, *c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, *c);
        }
        let mut acc: HashMap<Monomial, u32> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let slot = acc.entry(ma.mul(mb)).or_insert(0);
                *slot = k.add(*slot, k.mul(*ca, *cb));
            }
        }
        Self::from_map(k, nvars, acc)
    }

    /// Multiplies by `c * m`; graded-lex is a monomial order so the term
    /// order is preserved.
    pub fn mul_term(&self, m: &Monomial, c: u32) -> Self {
        let k = self.field;
        let c = c % k.p();
        if c == 0 {
            return Self::zero(k, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(mm, cc)| (mm.mul(m), k.mul(*cc, c)))
            .collect();
        Self::from_sorted(k, self.nvars.max(m.width()), terms)
    }

    pub fn scale(&self, c: u32) -> Self {
        self.mul_term(&Monomial::one(), c)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Scales so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(*c).expect("nonzero coefficient");
                self.scale(inv)
            }
        }
    }

    pub fn is_monic(&self) -> bool {
        matches!(self.terms.first(), Some((_, 1)))
    }

    /// `g(x1^p, ..., xd^p)`: every exponent multiplied by `p`.
    pub fn frobenius_substitute(&self) -> Result<Self> {
        self.scale_exponents(self.field.p() as u64)
    }

    /// Multiplies every exponent by `factor`.
    pub fn scale_exponents(&self, factor: u64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| m.map_exponents(|e| e.checked_mul(factor)).map(|m| (m, *c)))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::ExponentOverflow)?;
        Ok(Self::from_sorted(self.field, self.nvars, terms))
    }

    /// Whether every exponent is divisible by `p`.
    pub fn is_pth_power(&self) -> bool {
        let p = self.field.p() as u64;
        self.terms
            .iter()
            .all(|(m, _)| m.exponents().iter().all(|e| e % p == 0))
    }

    /// The `u` with `u^p = self`: exponents divided by `p`, coefficients kept
    /// (`c^p = c` in `Z_p`).
    pub fn pth_root(&self) -> Result<Self> {
        let p = self.field.p();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if let Some(&exponent) = m.exponents().iter().find(|&&e| e % p as u64 != 0) {
                return Err(Error::NotAPthPower { exponent, p });
            }
            let m = m.map_exponents(|e| Some(e / p as u64)).expect("total");
            terms.push((m, self.field.inv_frobenius(*c)));
        }
        Ok(Self::from_sorted(self.field, self.nvars, terms))
    }

    /// Formal partial derivative with respect to variable `i` (zero-based).
    pub fn derivative(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let k = self.field;
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            let c = k.mul(*c, k.reduce_u64(e));
            if c == 0 {
                continue;
            }
            let mut v = m.exponents().to_vec();
            v[i] -= 1;
            out.push((Monomial::new(v), c));
        }
        Ok(Self::from_terms(k, self.nvars, out))
    }

    /// Exact division. Fails with [`Error::NotDivisible`] if `divisor` does
    /// not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.check(divisor);
        let k = self.field;
        let (lm, lc) = match divisor.terms.first() {
            None => return Err(Error::DivisionByZero),
            Some((m, c)) => (m.clone(), *c),
        };
        if divisor.terms.len() == 1 {
            let inv = k.inv(lc)?;
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return Err(Error::NotDivisible);
                }
                out.push((lm.quotient_of(m), k.mul(*c, inv)));
            }
            return Ok(Self::from_sorted(k, self.nvars, out));
        }
        let lc_inv = k.inv(lc)?;
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.terms.first().cloned() {
            if !lm.divides(&m) {
                return Err(Error::NotDivisible);
            }
            let qm = lm.quotient_of(&m);
            let qc = k.mul(c, lc_inv);
            rem = rem.sub(&divisor.mul_term(&qm, qc));
            quotient.push((qm, qc));
        }
        Ok(Self::from_sorted(
            k,
            self.nvars.max(divisor.nvars),
            quotient,
        ))
    }

    /// Monic greatest common divisor; `gcd(a, 0) = monic(a)`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check(other);
        gcd::gcd(self, other)
    }

    /// Evaluates at a point of `F_{p^m}^d`.
    pub fn eval(&self, point: &[FqElem]) -> Result<FqElem> {
        let width = self.terms.iter().map(|(m, _)| m.width()).max().unwrap_or(0);
        if point.len() < width {
            return Err(Error::VariableOutOfRange {
                index: width - 1,
                nvars: point.len(),
            });
        }
        let field = match point.first() {
            Some(x) => x.field().clone(),
            None => {
                // constant polynomial with an empty point: evaluate in Z_p
                return Err(Error::VariableOutOfRange { index: 0, nvars: 0 });
            }
        };
        if field.p() != self.field.p() {
            return Err(Error::FieldMismatch(self.field.p(), field.p()));
        }
        for x in point {
            x.try_same_field(&point[0])?;
        }
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = field.constant(*c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &point[i].pow(e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Renders with caller-supplied variable names. `var(i)` names the
    /// zero-based variable `i` and must be a single factor (safe to follow
    /// with `^e`).
    pub fn format_with(&self, var: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                for (i, &e) in m.exponents().iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(var(i)),
                        _ => factors.push(format!("{}^{}", var(i), e)),
                    }
                }
                match (factors.is_empty(), *c) {
                    (true, c) => c.to_string(),
                    (false, 1) => factors.join("*"),
                    (false, c) => format!("{}*{}", c, factors.join("*")),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&|i| format!("x{}", i + 1)))
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Parses `"c*x1^a*x2^b + ..."` style literals for compact test inputs.
    /// Coefficients may be negative; exponents default to 1.
    pub fn poly(p: u64, nvars: usize, s: &str) -> MultiPoly {
        let k = PrimeField::new(p).unwrap();
        let mut terms = Vec::new();
        let s = s.replace(" - ", " + -");
        for raw in s.split('+') {
            let raw = raw.trim();
            let (neg, raw) = match raw.strip_prefix('-') {
                Some(r) => (true, r.trim()),
                None => (false, raw),
            };
            let mut coeff: i64 = 1;
            let mut exps = vec![0u64; nvars];
            for factor in raw.split('*') {
                let factor = factor.trim();
                if let Some(v) = factor.strip_prefix('x') {
                    let (idx, e) = match v.split_once('^') {
                        Some((i, e)) => (i.parse::<usize>().unwrap(), e.parse::<u64>().unwrap()),
                        None => (v.parse::<usize>().unwrap(), 1),
                    };
                    exps[idx - 1] += e;
                } else {
                    coeff *= factor.parse::<i64>().unwrap();
                }
            }
            if neg {
                coeff = -coeff;
            }
            terms.push((Monomial::new(exps), k.reduce(coeff)));
        }
        MultiPoly::from_terms(k, nvars, terms)
    }
}
