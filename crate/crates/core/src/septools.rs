//! Univariate polynomials in `t` over `F_p(I)` and the characteristic-`p`
//! separability toolkit: derivatives, Euclidean gcd, separability tests,
//! `p`-th roots of polynomials, and squarefree / separable decompositions.
//!
//! A polynomial carries a [`Mode`]. In [`Mode::Level0`] every coefficient
//! must lie in `Z_p(X)` (level 0), modelling the non-perfect field; any step
//! that would need a coefficient outside it fails with
//! [`Error::NotPerfectMode`] instead of escaping the field.

use std::fmt;

use crate::error::{Error, Result};
use crate::fqtower::FqElem;
use crate::perfclosure::{PerfElem, PerfectClosure};

/// Which coefficient field a [`UniPoly`] lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Coefficients in the perfect closure `F_p(I)`.
    Perfect,
    /// Coefficients restricted to `Z_p(X)`.
    Level0,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Perfect => "perfect",
            Mode::Level0 => "level0",
        })
    }
}

/// A polynomial `Σ c_i t^i`; `coeffs[i]` is `c_i`, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    ctx: PerfectClosure,
    mode: Mode,
    coeffs: Vec<PerfElem>,
}

/// `unit * Π factor^multiplicity` with pairwise coprime, monic, squarefree,
/// nonconstant factors, sorted by multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqfDecomposition {
    pub parts: Vec<(UniPoly, u64)>,
    pub unit: PerfElem,
}

/// `f(t) = s(t^(p^e))` with `s' ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepDecomposition {
    pub s: UniPoly,
    pub e: u32,
}

impl UniPoly {
    pub fn new(ctx: PerfectClosure, mode: Mode, coeffs: Vec<PerfElem>) -> Result<Self> {
        if mode == Mode::Level0 && coeffs.iter().any(|c| c.level() > 0) {
            return Err(Error::NotPerfectMode);
        }
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(UniPoly { ctx, mode, coeffs })
    }

    pub fn zero(ctx: PerfectClosure, mode: Mode) -> Self {
        UniPoly {
            ctx,
            mode,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(ctx: PerfectClosure, mode: Mode, c: PerfElem) -> Result<Self> {
        Self::new(ctx, mode, vec![c])
    }

    /// The indeterminate `t`.
    pub fn t(ctx: PerfectClosure, mode: Mode) -> Self {
        UniPoly {
            ctx,
            mode,
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    fn same(&self, coeffs: Vec<PerfElem>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        debug_assert!(self.mode == Mode::Perfect || coeffs.iter().all(|c| c.level() == 0));
        UniPoly {
            ctx: self.ctx,
            mode: self.mode,
            coeffs,
        }
    }

    pub fn context(&self) -> &PerfectClosure {
        &self.ctx
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Same coefficients viewed in another mode; fails when moving to
    /// [`Mode::Level0`] with a coefficient outside `Z_p(X)`.
    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(self.ctx, mode, self.coeffs.clone())
    }

    pub fn coeffs(&self) -> &[PerfElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PerfElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading_coeff(&self) -> Option<&PerfElem> {
        self.coeffs.last()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.ctx.add(&self.coeff(i), &other.coeff(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.same(coeffs))
    }

    pub fn neg(&self) -> Self {
        self.same(self.coeffs.iter().map(|c| self.ctx.neg(c)).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.same(Vec::new()));
        }
        let mut out = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = self.ctx.add(&out[i + j], &self.ctx.mul(a, b)?)?;
            }
        }
        Ok(self.same(out))
    }

    pub fn scale(&self, c: &PerfElem) -> Result<Self> {
        if self.mode == Mode::Level0 && c.level() > 0 {
            return Err(Error::NotPerfectMode);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| self.ctx.mul(x, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.same(coeffs))
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = self.same(vec![self.ctx.one()]);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Divides by the leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Result<Self> {
        match self.leading_coeff() {
            None => Ok(self.clone()),
            Some(lc) if lc.is_one() => Ok(self.clone()),
            Some(lc) => self.scale(&self.ctx.inv(lc)?),
        }
    }

    /// Formal derivative `Σ i c_i t^(i-1)` with `i` reduced mod `p`.
    pub fn derivative(&self) -> Result<Self> {
        let p = self.ctx.p() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let k = (i % p) as i64;
                if k == 0 {
                    Ok(self.ctx.zero())
                } else {
                    self.ctx.mul(c, &self.ctx.constant(k))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.same(coeffs))
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = self.ctx.inv(divisor.leading_coeff().expect("nonzero"))?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((self.same(Vec::new()), self.clone()));
        }
        let mut quot = vec![self.ctx.zero(); rem.len() - db];
        while rem.len() > db {
            let top = rem.len() - 1;
            let c = self.ctx.mul(&rem[top], &lc_inv)?;
            let shift = top - db;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    let prod = self.ctx.mul(&c, d)?;
                    rem[shift + j] = self.ctx.sub(&rem[shift + j], &prod)?;
                }
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(|x| x.is_zero()) {
                rem.pop();
            }
        }
        Ok((self.same(quot), self.same(rem)))
    }

    /// Division that must be exact; a remainder means an internal error.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::NotDivisible);
        }
        Ok(q)
    }

    /// Monic gcd by the Euclidean algorithm; `gcd(f, 0) = monic(f)`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r.monic()?;
        }
        a.monic()
    }

    /// Whether `gcd(f, f')` is constant.
    pub fn is_separable(&self) -> Result<bool> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let d = self.derivative()?;
        if d.is_zero() {
            return Ok(false);
        }
        Ok(self.gcd(&d)?.is_constant())
    }

    /// For `f' = 0`, the `g` with `g^p = f`: exponents divided by `p` and
    /// coefficients replaced by their `p`-th roots.
    pub fn pth_root(&self) -> Result<Self> {
        let p = self.ctx.p() as usize;
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % p != 0 && !c.is_zero())
        {
            return Err(Error::DerivativeNonzero);
        }
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| {
                let r = self.ctx.pth_root(c)?;
                if self.mode == Mode::Level0 && r.level() > 0 {
                    return Err(Error::NotPerfectMode);
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.same(coeffs))
    }

    /// `f(t^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![self.ctx.zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        self.same(coeffs)
    }

    /// Squarefree decomposition by a gcd cascade; whenever the remaining
    /// cofactor has zero derivative it is replaced by its `p`-th root and the
    /// multiplicities found for it are scaled by `p`.
    pub fn squarefree_decomposition(&self) -> Result<SqfDecomposition> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let unit = self.leading_coeff().expect("nonconstant").clone();
        let mut parts = Vec::new();
        sqf_monic(&self.monic()?, 1, &mut parts)?;
        parts.sort_by_key(|(_, m)| *m);
        Ok(SqfDecomposition { parts, unit })
    }

    /// Strips `t -> t^p` substitutions until the derivative is nonzero.
    pub fn separable_decomposition(&self) -> Result<SepDecomposition> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let p = self.ctx.p() as usize;
        let mut s = self.clone();
        let mut e = 0;
        while s.derivative()?.is_zero() {
            s = s.same(s.coeffs.iter().step_by(p).cloned().collect());
            e += 1;
        }
        Ok(SepDecomposition { s, e })
    }

    /// Coefficients evaluated at `point` (see [`PerfectClosure::eval`]).
    pub fn eval_coefficients(&self, point: &[FqElem]) -> Result<Vec<FqElem>> {
        self.coeffs
            .iter()
            .map(|c| self.ctx.eval(c, point))
            .collect()
    }

    /// Text form; coefficients use the element syntax and `t` is the
    /// indeterminate.
    pub fn format(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let cs = c.format();
            parts.push(match (i, c.is_one()) {
                (0, _) => cs,
                (_, true) => mono,
                _ if cs.contains(' ') => format!("({cs})*{mono}"),
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

fn sqf_monic(f: &UniPoly, scale: u64, out: &mut Vec<(UniPoly, u64)>) -> Result<()> {
    let p = f.ctx.p() as u64;
    let d = f.derivative()?;
    if d.is_zero() {
        return sqf_monic(&f.pth_root()?.monic()?, scale * p, out);
    }
    let mut c = f.gcd(&d)?;
    let mut w = f.exact_div(&c)?;
    let mut i = 1u64;
    while !w.is_constant() {
        let y = w.gcd(&c)?;
        let z = w.exact_div(&y)?;
        if !z.is_constant() {
            out.push((z.monic()?, i * scale));
        }
        i += 1;
        c = c.exact_div(&y)?;
        w = y;
    }
    if !c.is_constant() {
        // every remaining multiplicity is divisible by p, so c' = 0
        sqf_monic(&c.pth_root()?.monic()?, scale * p, out)?;
    }
    Ok(())
}

impl SqfDecomposition {
    /// `unit * Π factor^multiplicity`.
    pub fn reassemble(&self) -> Result<UniPoly> {
        let first = self
            .parts
            .first()
            .map(|(f, _)| f)
            .ok_or(Error::ConstantPolynomial)?;
        let mut acc = UniPoly::constant(first.ctx, first.mode, self.unit.clone())?;
        for (f, m) in &self.parts {
            acc = acc.mul(&f.pow(*m)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for SqfDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(g, m)| format!("({g}, {m})"))
            .collect();
        write!(f, "unit = {}, parts = [{}]", self.unit, parts.join(", "))
    }
}

impl SepDecomposition {
    /// `s(t^(p^e))`.
    pub fn reassemble(&self) -> UniPoly {
        let p = self.s.ctx.p() as usize;
        self.s.compose_power(p.pow(self.e))
    }
}

impl fmt::Display for SepDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s = {}, e = {}", self.s, self.e)
    }
}
