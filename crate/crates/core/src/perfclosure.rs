//! The perfect closure `F_p(I) = ⋃ Z_p(x^(1/p^n))` of `Z_p(x1, ..., xd)`.
//!
//! An element is a pair `(level n, body)` where `body` is a rational function
//! whose variable `x_i` stands for `x_i^(1/p^n)`. Raising the level by one
//! multiplies every exponent of the body by `p`; the canonical form uses the
//! least level at which the element can be written. Because bodies are in
//! lowest terms with monic denominators, the level can be lowered exactly
//! when every exponent of numerator and denominator is divisible by `p`, so
//! equality of elements is structural equality of canonical forms.
//!
//! Frobenius and its inverse are level shifts: for `a = g/h` at level `n`,
//! `a^p = g(y^p)/h(y^p)` with `y^p` the level `n - 1` variables (coefficients
//! in `Z_p` are fixed by Frobenius), so `a^p` has the same body at level
//! `n - 1`, and the `p`-th root has the same body at level `n + 1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fqtower::FqElem;
use crate::primefield::PrimeField;
use crate::ratfunc::RatFunc;

/// Default cap on element levels.
pub const DEFAULT_MAX_LEVEL: u32 = 64;
/// Largest exponent allowed in a body after lifting or multiplication.
pub const MAX_EXPONENT: u64 = 1 << 32;
/// Largest total degree a power may produce before it is refused.
pub const MAX_POWER_DEGREE: u64 = 1 << 12;

/// Session context: characteristic, number of variables and level cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerfectClosure {
    field: PrimeField,
    nvars: usize,
    max_level: u32,
}

/// An element of `F_p(I)` in canonical minimal-level form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerfElem {
    level: u32,
    body: RatFunc,
}

/// A not necessarily minimal `(level, body)` representation, as produced by
/// [`PerfectClosure::lift`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelForm {
    pub level: u32,
    pub body: RatFunc,
}

impl PerfElem {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn body(&self) -> &RatFunc {
        &self.body
    }

    pub fn field(&self) -> PrimeField {
        self.body.field()
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.body.is_one()
    }

    /// Value in `Z_p` when the element is a constant.
    pub fn constant_value(&self) -> Option<u32> {
        self.body.constant_value()
    }

    /// Checks the canonical-form invariants: monic coprime body and minimal
    /// level.
    pub fn is_canonical(&self) -> bool {
        let body_ok = self.body.den().is_monic()
            && (self.body.is_zero() && self.body.den().is_one()
                || self
                    .body
                    .num()
                    .gcd(self.body.den())
                    .map(|g| g.is_one())
                    .unwrap_or(false));
        body_ok && (self.level == 0 || !self.body.is_pth_power())
    }

    /// Text form with level-`n` variables written `root(xi,n)`.
    pub fn format(&self) -> String {
        let level = self.level;
        if level == 0 {
            self.body.format_with(&|i| format!("x{}", i + 1))
        } else {
            self.body
                .format_with(&|i| format!("root(x{},{})", i + 1, level))
        }
    }
}

impl fmt::Display for PerfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl PerfectClosure {
    pub fn new(p: u64, nvars: usize) -> Result<Self> {
        Ok(PerfectClosure {
            field: PrimeField::new(p)?,
            nvars,
            max_level: DEFAULT_MAX_LEVEL,
        })
    }

    pub fn with_max_level(self, max_level: u32) -> Self {
        PerfectClosure { max_level, ..self }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn zero(&self) -> PerfElem {
        self.from_ratfunc(RatFunc::zero(self.field, self.nvars))
    }

    pub fn one(&self) -> PerfElem {
        self.from_ratfunc(RatFunc::one(self.field, self.nvars))
    }

    pub fn constant(&self, c: i64) -> PerfElem {
        self.from_ratfunc(RatFunc::constant(self.field, self.nvars, c))
    }

    /// The variable `x_{i+1}` at level 0.
    pub fn var(&self, i: usize) -> Result<PerfElem> {
        Ok(self.from_ratfunc(RatFunc::var(self.field, self.nvars, i)?))
    }

    /// Embeds `Z_p(X)` at level 0.
    pub fn from_ratfunc(&self, body: RatFunc) -> PerfElem {
        PerfElem { level: 0, body }
    }

    fn check_level(&self, level: u32) -> Result<()> {
        if level > self.max_level {
            return Err(Error::LevelOverflow {
                level,
                max: self.max_level,
            });
        }
        Ok(())
    }

    /// Rewrites `a` at level `m >= a.level()` by raising every exponent to
    /// the power `p^(m - level)`.
    pub fn lift(&self, a: &PerfElem, m: u32) -> Result<LevelForm> {
        if m < a.level {
            return Err(Error::LevelTooLow {
                from: a.level,
                to: m,
            });
        }
        self.check_level(m)?;
        if m == a.level {
            return Ok(LevelForm {
                level: m,
                body: a.body.clone(),
            });
        }
        let factor = (self.p() as u64)
            .checked_pow(m - a.level)
            .ok_or(Error::ExponentOverflow)?;
        let top = a
            .body
            .max_exponent()
            .checked_mul(factor)
            .ok_or(Error::ExponentOverflow)?;
        if top > MAX_EXPONENT {
            return Err(Error::ExponentOverflow);
        }
        Ok(LevelForm {
            level: m,
            body: a.body.scale_exponents(factor)?,
        })
    }

    /// Lowers the level while the body is a `p`-th power.
    pub fn canonicalize(&self, mut level: u32, mut body: RatFunc) -> Result<PerfElem> {
        while level > 0 && body.is_pth_power() {
            body = body.pth_root()?;
            level -= 1;
        }
        self.check_level(level)?;
        Ok(PerfElem { level, body })
    }

    pub fn canonicalize_form(&self, form: LevelForm) -> Result<PerfElem> {
        self.canonicalize(form.level, form.body)
    }

    fn common_level(&self, a: &PerfElem, b: &PerfElem) -> Result<(u32, RatFunc, RatFunc)> {
        let level = a.level.max(b.level);
        let la = self.lift(a, level)?;
        let lb = self.lift(b, level)?;
        Ok((level, la.body, lb.body))
    }

    pub fn add(&self, a: &PerfElem, b: &PerfElem) -> Result<PerfElem> {
        let (level, x, y) = self.common_level(a, b)?;
        self.canonicalize(level, x.add(&y)?)
    }

    pub fn sub(&self, a: &PerfElem, b: &PerfElem) -> Result<PerfElem> {
        let (level, x, y) = self.common_level(a, b)?;
        self.canonicalize(level, x.sub(&y)?)
    }

    pub fn neg(&self, a: &PerfElem) -> PerfElem {
        PerfElem {
            level: a.level,
            body: a.body.neg(),
        }
    }

    pub fn mul(&self, a: &PerfElem, b: &PerfElem) -> Result<PerfElem> {
        let (level, x, y) = self.common_level(a, b)?;
        if x.max_exponent().saturating_add(y.max_exponent()) > MAX_EXPONENT {
            return Err(Error::ExponentOverflow);
        }
        self.canonicalize(level, x.mul(&y)?)
    }

    pub fn inv(&self, a: &PerfElem) -> Result<PerfElem> {
        Ok(PerfElem {
            level: a.level,
            body: a.body.inv()?,
        })
    }

    pub fn div(&self, a: &PerfElem, b: &PerfElem) -> Result<PerfElem> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (level, x, y) = self.common_level(a, b)?;
        if x.max_exponent().saturating_add(y.max_exponent()) > MAX_EXPONENT {
            return Err(Error::ExponentOverflow);
        }
        self.canonicalize(level, x.div(&y)?)
    }

    /// Integer power. The `p`-power part of the exponent is applied as
    /// Frobenius; the rest by repeated squaring, refused when it would push
    /// the total degree past [`MAX_POWER_DEGREE`].
    pub fn pow(&self, a: &PerfElem, e: i64) -> Result<PerfElem> {
        if e < 0 && a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.is_zero() {
            return Ok(if e == 0 { self.one() } else { self.zero() });
        }
        let p = self.p() as u64;
        let mut m = e.unsigned_abs();
        let mut frob = 0u32;
        while m > 0 && m.is_multiple_of(p) {
            m /= p;
            frob += 1;
        }
        let deg = a
            .body
            .num()
            .total_degree()
            .unwrap_or(0)
            .max(a.body.den().total_degree().unwrap_or(0));
        if deg.saturating_mul(m) > MAX_POWER_DEGREE {
            return Err(Error::ExponentOverflow);
        }
        let base = PerfElem {
            level: a.level,
            body: a.body.pow(if e < 0 { -(m as i64) } else { m as i64 })?,
        };
        let mut r = self.canonicalize(base.level, base.body)?;
        for _ in 0..frob {
            r = self.frobenius(&r)?;
        }
        Ok(r)
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &PerfElem) -> Result<PerfElem> {
        if a.level > 0 {
            return Ok(PerfElem {
                level: a.level - 1,
                body: a.body.clone(),
            });
        }
        if a.body.max_exponent().saturating_mul(self.p() as u64) > MAX_EXPONENT {
            return Err(Error::ExponentOverflow);
        }
        Ok(PerfElem {
            level: 0,
            body: a.body.frobenius_substitute()?,
        })
    }

    /// `a^(p^k)`.
    pub fn frobenius_pow(&self, a: &PerfElem, k: u32) -> Result<PerfElem> {
        let mut r = a.clone();
        for _ in 0..k {
            r = self.frobenius(&r)?;
        }
        Ok(r)
    }

    /// The unique `b` with `b^p = a`: the same body read one level up.
    pub fn pth_root(&self, a: &PerfElem) -> Result<PerfElem> {
        if a.level == 0 && a.body.is_pth_power() {
            return Ok(PerfElem {
                level: 0,
                body: a.body.pth_root()?,
            });
        }
        self.check_level(a.level + 1)?;
        Ok(PerfElem {
            level: a.level + 1,
            body: a.body.clone(),
        })
    }

    /// The unique `b` with `b^(p^k) = a`.
    pub fn pn_root(&self, a: &PerfElem, k: u32) -> Result<PerfElem> {
        let mut r = a.clone();
        for _ in 0..k {
            r = self.pth_root(&r)?;
        }
        Ok(r)
    }

    /// Evaluates at `point`, sending the level-`n` variable `x_i^(1/p^n)` to
    /// the unique `p^n`-th root of `point[i]` in the finite field.
    pub fn eval(&self, a: &PerfElem, point: &[FqElem]) -> Result<FqElem> {
        let roots: Vec<FqElem> = point
            .iter()
            .map(|x| (0..a.level).fold(x.clone(), |acc, _| acc.inv_frobenius()))
            .collect();
        a.body.eval(&roots)
    }
}
