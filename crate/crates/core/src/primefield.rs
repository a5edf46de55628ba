//! Arithmetic in the prime field Z/pZ.
//!
//! A [`PrimeField`] is a validated prime context. Residues are stored as `u32`
//! in `[0, p)`; since `p < 2^31` every product fits in a `u64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest admissible characteristic (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

/// A prime characteristic `p < 2^31`, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    /// Residue of an arbitrary signed integer.
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn reduce_u64(self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    pub fn elem(self, v: i64) -> PrimeFieldElem {
        PrimeFieldElem {
            value: self.reduce(v),
            p: self.p,
        }
    }

    pub fn zero(self) -> PrimeFieldElem {
        self.elem(0)
    }

    pub fn one(self) -> PrimeFieldElem {
        self.elem(1)
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(s0))
    }

    pub fn div(self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^p`. Equal to `a` by Fermat's little theorem, so no work is done.
    #[inline]
    pub fn frobenius(self, a: u32) -> u32 {
        a
    }

    /// Inverse of [`PrimeField::frobenius`].
    #[inline]
    pub fn inv_frobenius(self, a: u32) -> u32 {
        a
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}", self.p)
    }
}

/// A residue class modulo `p`, carrying its characteristic.
///
/// Mixing elements of different characteristics through the operator traits
/// is a programming error and panics; use the `try_*` methods at untrusted
/// boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeFieldElem {
    value: u32,
    p: u32,
}

impl PrimeFieldElem {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Self) -> Result<PrimeField> {
        if self.p != other.p {
            return Err(Error::FieldMismatch(self.p, other.p));
        }
        Ok(self.field())
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        let f = self.check(other)?;
        Ok(PrimeFieldElem {
            value: f.add(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        let f = self.check(other)?;
        Ok(PrimeFieldElem {
            value: f.mul(self.value, other.value),
            p: self.p,
        })
    }

    pub fn inv(self) -> Result<Self> {
        let value = self.field().inv(self.value)?;
        Ok(PrimeFieldElem { value, p: self.p })
    }

    pub fn pow(self, e: u64) -> Self {
        PrimeFieldElem {
            value: self.field().pow(self.value, e),
            p: self.p,
        }
    }

    pub fn frobenius(self) -> Self {
        PrimeFieldElem {
            value: self.field().frobenius(self.value),
            p: self.p,
        }
    }
}

impl Add for PrimeFieldElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("prime field mismatch")
    }
}

impl Sub for PrimeFieldElem {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PrimeFieldElem {
    type Output = Self;
    fn neg(self) -> Self {
        PrimeFieldElem {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}

impl Mul for PrimeFieldElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("prime field mismatch")
    }
}

impl fmt::Display for PrimeFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_non_primes() {
        for n in [0u64, 1, 4, 9, 91, 1 << 31, (1 << 31) + 11] {
            assert!(PrimeField::new(n).is_err(), "{n}");
        }
        assert!(PrimeField::new(2147483647).is_ok());
    }

    #[test]
    fn add_examples() {
        assert_eq!(f(5).elem(3) + f(5).elem(4), f(5).elem(2));
        assert_eq!(f(2).elem(1) + f(2).elem(1), f(2).elem(0));
        assert_eq!(f(7).elem(0) + f(7).elem(6), f(7).elem(6));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(f(5).elem(3) * f(5).elem(4), f(5).elem(2));
        assert_eq!(f(3).elem(2) * f(3).elem(2), f(3).elem(1));
        assert_eq!(f(2).elem(1) * f(2).elem(1), f(2).elem(1));
    }

    #[test]
    fn inv_examples() {
        assert_eq!(f(5).elem(3).inv().unwrap(), f(5).elem(2));
        assert_eq!(f(7).elem(1).inv().unwrap(), f(7).elem(1));
        assert_eq!(f(11).elem(10).inv().unwrap(), f(11).elem(10));
        assert_eq!(f(7).elem(0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(f(5).elem(3).frobenius(), f(5).elem(3));
        assert_eq!(f(2).elem(1).frobenius(), f(2).elem(1));
        assert_eq!(f(13).elem(7).frobenius(), f(13).elem(7));
    }

    #[test]
    fn cross_field_is_rejected() {
        assert_eq!(
            f(5).elem(1).try_add(f(7).elem(1)),
            Err(Error::FieldMismatch(5, 7))
        );
    }

    #[test]
    fn fermat_and_inverses_exhaustive() {
        for p in (2..=101u64).filter(|&n| is_prime(n)) {
            let k = f(p);
            for a in 0..p as u32 {
                assert_eq!(k.frobenius(a), a);
                assert_eq!(k.pow(a, p), a, "p={p} a={a}");
                if a != 0 {
                    assert_eq!(k.mul(k.inv(a).unwrap(), a), 1);
                }
            }
        }
    }

    fn arb_triple() -> impl Strategy<Value = (u64, u32, u32, u32)> {
        prop::sample::select(vec![2u64, 3, 5, 7, 101, 65521, 2147483647])
            .prop_flat_map(|p| (Just(p), 0..p as u32, 0..p as u32, 0..p as u32))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn field_axioms((p, a, b, c) in arb_triple()) {
            let k = f(p);
            prop_assert_eq!(k.add(a, k.add(b, c)), k.add(k.add(a, b), c));
            prop_assert_eq!(k.mul(a, k.mul(b, c)), k.mul(k.mul(a, b), c));
            prop_assert_eq!(k.add(a, b), k.add(b, a));
            prop_assert_eq!(k.mul(a, b), k.mul(b, a));
            prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
            prop_assert_eq!(k.add(a, k.neg(a)), 0);
        }
    }
}
