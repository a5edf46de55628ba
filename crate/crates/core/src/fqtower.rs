//! Finite fields `F_{p^n}` over the prime field, used both as the `I = ∅`
//! model of an algebraic extension of a fundamental perfect field and as the
//! evaluation domain for the randomized oracles elsewhere in the crate.
//!
//! Elements are residues of polynomials over `Z_p` modulo a fixed monic
//! irreducible modulus. The modulus for a given `(p, n)` is the first
//! irreducible in enumeration order: monic degree-`n` polynomials are listed
//! by reading the coefficient vector `(c_0, ..., c_{n-1})` as base-`p` digits
//! with `c_0` least significant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::primefield::PrimeField;

/// Largest field size accepted by [`FqField::new`].
pub const MAX_FIELD_SIZE: u64 = 1 << 20;
/// Largest field size accepted by the exhaustive [`FqField::check_perfect`].
pub const MAX_EXHAUSTIVE_SIZE: u64 = 1 << 16;
/// Largest extension degree accepted by [`FqField::new`].
pub const MAX_DEGREE: u32 = 16;

/// Dense polynomials over `Z_p`, lowest degree first, no trailing zeros.
pub(crate) mod dense {
    use crate::primefield::PrimeField;

    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn sub(k: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = k.sub(x, y);
        }
        trim(&mut out);
        out
    }

    pub fn mul(k: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(k: PrimeField, a: &[u32], m: &[u32]) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lc_inv = k.inv(m[dm]).expect("nonzero leading coefficient");
        while r.len() > dm {
            let top = r.len() - 1;
            let c = k.mul(r[top], lc_inv);
            if c != 0 {
                let shift = top - dm;
                for (j, &mj) in m.iter().enumerate() {
                    r[shift + j] = k.sub(r[shift + j], k.mul(c, mj));
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn monic(k: PrimeField, a: &[u32]) -> Vec<u32> {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => {
                let inv = k.inv(lc).expect("nonzero leading coefficient");
                a.iter().map(|&c| k.mul(c, inv)).collect()
            }
        }
    }

    pub fn gcd(k: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(k, &x, &y);
            x = y;
            y = r;
        }
        monic(k, &x)
    }

    pub fn mulmod(k: PrimeField, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        rem(k, &mul(k, a, b), m)
    }

    pub fn powmod(k: PrimeField, a: &[u32], mut e: u64, m: &[u32]) -> Vec<u32> {
        let mut base = rem(k, a, m);
        let mut acc = rem(k, &[1], m);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(k, &acc, &base, m);
            }
            base = mulmod(k, &base, &base, m);
            e >>= 1;
        }
        acc
    }
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over `Z_p` given
/// lowest degree first.
pub fn is_irreducible(k: PrimeField, f: &[u32]) -> bool {
    let mut f = f.to_vec();
    dense::trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let n = (f.len() - 1) as u32;
    let f = dense::monic(k, &f);
    let t = [0u32, 1];
    // x^(p^j) mod f for j = 0..=n
    let mut powers = Vec::with_capacity(n as usize + 1);
    let mut cur = dense::rem(k, &t, &f);
    powers.push(cur.clone());
    for _ in 0..n {
        cur = dense::powmod(k, &cur, k.p() as u64, &f);
        powers.push(cur.clone());
    }
    let tt = dense::rem(k, &t, &f);
    if !dense::sub(k, &powers[n as usize], &tt).is_empty() {
        return false;
    }
    prime_divisors(n).into_iter().all(|q| {
        let diff = dense::sub(k, &powers[(n / q) as usize], &tt);
        dense::gcd(k, &diff, &f) == vec![1]
    })
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FqInner {
    k: PrimeField,
    n: u32,
    size: u64,
    /// Monic, lowest degree first, length `n + 1`.
    modulus: Vec<u32>,
}

/// The field `F_{p^n}`. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqField(Arc<FqInner>);

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{} mod {}",
            self.p(),
            self.degree(),
            self.modulus_string()
        )
    }
}

impl FqField {
    /// Builds `F_{p^n}` with the canonical (first irreducible) modulus.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let k = PrimeField::new(p)?;
        let pp = k.p();
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::BoundExceeded { p: pp, n });
        }
        let size = (pp as u64)
            .checked_pow(n)
            .filter(|&s| s <= MAX_FIELD_SIZE)
            .ok_or(Error::BoundExceeded { p: pp, n })?;
        for idx in 0..size {
            let mut modulus = digits(idx, pp, n);
            modulus.push(1);
            if is_irreducible(k, &modulus) {
                return Ok(FqField(Arc::new(FqInner {
                    k,
                    n,
                    size,
                    modulus,
                })));
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    pub fn prime_field(&self) -> PrimeField {
        self.0.k
    }

    pub fn p(&self) -> u32 {
        self.0.k.p()
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Monic modulus, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_string(&self) -> String {
        format_dense(&self.0.modulus)
    }

    pub fn zero(&self) -> FqElem {
        self.from_coeffs(&[])
    }

    pub fn one(&self) -> FqElem {
        self.from_coeffs(&[1])
    }

    /// Image of a prime field residue.
    pub fn constant(&self, c: u32) -> FqElem {
        self.from_coeffs(&[c % self.p()])
    }

    /// The residue class of `t`.
    pub fn generator(&self) -> FqElem {
        self.from_coeffs(&[0, 1])
    }

    /// Reduces an arbitrary coefficient vector (lowest degree first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> FqElem {
        let k = self.0.k;
        let reduced: Vec<u32> = coeffs.iter().map(|&c| c % k.p()).collect();
        let r = dense::rem(k, &reduced, &self.0.modulus);
        self.pack(r)
    }

    fn pack(&self, mut r: Vec<u32>) -> FqElem {
        r.resize(self.0.n as usize, 0);
        FqElem {
            field: self.clone(),
            rep: r,
        }
    }

    /// The element whose coefficient vector spells `idx` in base `p`,
    /// constant term least significant.
    pub fn element(&self, idx: u64) -> FqElem {
        debug_assert!(idx < self.size());
        self.pack(digits(idx, self.p(), self.0.n))
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.size()).map(move |i| self.element(i))
    }

    /// Exhaustively checks that Frobenius permutes the field.
    pub fn check_perfect(&self) -> Result<PerfectnessReport> {
        let q = self.size();
        if q > MAX_EXHAUSTIVE_SIZE {
            return Err(Error::BoundExceeded {
                p: self.p(),
                n: self.degree(),
            });
        }
        let q = q as usize;
        let mut image = vec![0usize; q];
        let mut hit = vec![false; q];
        let mut counterexample = None;
        for (i, slot) in image.iter_mut().enumerate() {
            let a = self.element(i as u64);
            let j = a.frobenius().index() as usize;
            if hit[j] && counterexample.is_none() {
                counterexample = Some(a);
            }
            hit[j] = true;
            *slot = j;
        }
        let bijective = counterexample.is_none() && hit.iter().all(|&h| h);
        let order = if bijective {
            permutation_order(&image)
        } else {
            0
        };
        Ok(PerfectnessReport {
            p: self.p(),
            n: self.degree(),
            size: self.size(),
            bijective,
            order,
            counterexample,
        })
    }
}

fn permutation_order(image: &[usize]) -> u64 {
    let mut seen = vec![false; image.len()];
    let mut order = 1u64;
    for start in 0..image.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = image[i];
            len += 1;
        }
        order = lcm(order, len);
    }
    order
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn digits(mut idx: u64, p: u32, n: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push((idx % p as u64) as u32);
        idx /= p as u64;
    }
    out
}

fn format_dense(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Result of [`FqField::check_perfect`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectnessReport {
    pub p: u32,
    pub n: u32,
    pub size: u64,
    pub bijective: bool,
    /// Order of Frobenius as a permutation; 0 when not bijective.
    pub order: u64,
    pub counterexample: Option<FqElem>,
}

impl PerfectnessReport {
    pub fn passed(&self) -> bool {
        self.bijective
            && self.counterexample.is_none()
            && (self.n as u64).is_multiple_of(self.order)
    }
}

impl fmt::Display for PerfectnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(
                f,
                "pass: Frobenius bijective on {} elements, order {}",
                self.size, self.order
            )
        } else {
            write!(f, "fail: Frobenius not bijective on {} elements", self.size)?;
            if let Some(c) = &self.counterexample {
                write!(f, ", collision at {c}")?;
            }
            Ok(())
        }
    }
}

/// An element of `F_{p^n}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqElem {
    field: FqField,
    /// Exactly `n` coefficients, lowest degree first.
    rep: Vec<u32>,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v = self.rep.clone();
        dense::trim(&mut v);
        f.write_str(&format_dense(&v))
    }
}

impl FqElem {
    pub fn field(&self) -> &FqField {
        &self.field
    }

    /// Coefficients modulo the field's modulus, lowest degree first.
    pub fn coeffs(&self) -> &[u32] {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.rep[0] == 1 && self.rep[1..].iter().all(|&c| c == 0)
    }

    /// Position in the field's enumeration order.
    pub fn index(&self) -> u64 {
        let p = self.field.p() as u64;
        self.rep
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + c as u64)
    }

    fn same_field(&self, other: &Self) {
        assert!(self.field == other.field, "finite field mismatch");
    }

    pub fn try_same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FqMismatch)
        }
    }

    pub fn inv(&self) -> Result<FqElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid in Z_p[t]
        let k = self.field.prime_field();
        let m = self.field.modulus().to_vec();
        let mut a = self.rep.clone();
        dense::trim(&mut a);
        let (mut r0, mut r1) = (m.clone(), a);
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(k, &r0, &r1);
            let s2 = dense::sub(k, &s0, &dense::mul(k, &q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant since the modulus is irreducible
        let c = k.inv(r0[0])?;
        let s: Vec<u32> = s0.iter().map(|&x| k.mul(x, c)).collect();
        Ok(self.field.from_coeffs(&s))
    }

    pub fn div(&self, other: &Self) -> Result<FqElem> {
        self.same_field(other);
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `a^p`.
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.p() as u64)
    }

    /// The unique `b` with `b^p = a`, computed as `a^(p^(n-1))`.
    pub fn inv_frobenius(&self) -> FqElem {
        let mut r = self.clone();
        for _ in 1..self.field.degree() {
            r = r.frobenius();
        }
        r
    }

    /// Maps this element into `target` along the canonical embedding.
    pub fn embed(&self, target: &FqField) -> Result<FqElem> {
        Ok(FqEmbedding::new(&self.field, target)?.apply(self))
    }
}

fn divrem(k: PrimeField, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    dense::trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    let inv = k.inv(b[db]).expect("nonzero divisor");
    while r.len() > db {
        let top = r.len() - 1;
        let c = k.mul(r[top], inv);
        let shift = top - db;
        q[shift] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = k.sub(r[shift + j], k.mul(c, bj));
        }
        r.pop();
        dense::trim(&mut r);
    }
    dense::trim(&mut q);
    (q, r)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&FqElem> for &FqElem {
            type Output = FqElem;
            fn $method(self, rhs: &FqElem) -> FqElem {
                self.same_field(rhs);
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $tr for FqElem {
            type Output = FqElem;
            fn $method(self, rhs: FqElem) -> FqElem {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &FqElem, b: &FqElem| {
    let k = a.field.prime_field();
    let rep = a
        .rep
        .iter()
        .zip(&b.rep)
        .map(|(&x, &y)| k.add(x, y))
        .collect();
    FqElem {
        field: a.field.clone(),
        rep,
    }
});

binop!(Sub, sub, |a: &FqElem, b: &FqElem| {
    let k = a.field.prime_field();
    let rep = a
        .rep
        .iter()
        .zip(&b.rep)
        .map(|(&x, &y)| k.sub(x, y))
        .collect();
    FqElem {
        field: a.field.clone(),
        rep,
    }
});

binop!(Mul, mul, |a: &FqElem, b: &FqElem| {
    let k = a.field.prime_field();
    let prod = dense::mul(k, &a.rep, &b.rep);
    a.field.pack(dense::rem(k, &prod, a.field.modulus()))
});

impl Neg for &FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        let k = self.field.prime_field();
        FqElem {
            field: self.field.clone(),
            rep: self.rep.iter().map(|&x| k.neg(x)).collect(),
        }
    }
}

impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        -&self
    }
}

/// The canonical embedding `F_{p^m} -> F_{p^n}` for `m | n`: the source
/// generator goes to the first root of the source modulus in the target's
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqEmbedding {
    source: FqField,
    target: FqField,
    image_of_generator: FqElem,
}

impl FqEmbedding {
    pub fn new(source: &FqField, target: &FqField) -> Result<Self> {
        let (m, n) = (source.degree(), target.degree());
        if source.p() != target.p() {
            return Err(Error::FqMismatch);
        }
        if n % m != 0 {
            return Err(Error::NoEmbedding {
                p: source.p(),
                from: m,
                to: n,
            });
        }
        let root = target
            .elements()
            .find(|x| eval_dense(source.modulus(), x).is_zero())
            .expect("a field of degree m embeds in every field of degree divisible by m");
        Ok(FqEmbedding {
            source: source.clone(),
            target: target.clone(),
            image_of_generator: root,
        })
    }

    pub fn source(&self) -> &FqField {
        &self.source
    }

    pub fn target(&self) -> &FqField {
        &self.target
    }

    pub fn image_of_generator(&self) -> &FqElem {
        &self.image_of_generator
    }

    pub fn apply(&self, a: &FqElem) -> FqElem {
        assert!(a.field == self.source, "element not in embedding source");
        eval_dense(&a.rep, &self.image_of_generator)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FqEmbedding) -> Result<FqEmbedding> {
        if self.target != next.source {
            return Err(Error::FqMismatch);
        }
        Ok(FqEmbedding {
            source: self.source.clone(),
            target: next.target.clone(),
            image_of_generator: next.apply(&self.image_of_generator),
        })
    }
}

/// Horner evaluation of a `Z_p` polynomial (lowest degree first) at `x`.
fn eval_dense(coeffs: &[u32], x: &FqElem) -> FqElem {
    let field = x.field();
    coeffs
        .iter()
        .rev()
        .fold(field.zero(), |acc, &c| &(&acc * x) + &field.constant(c))
}
