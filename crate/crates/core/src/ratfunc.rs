//! The rational function field `Z_p(x1, ..., xd)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fqtower::FqElem;
use crate::multipoly::MultiPoly;
use crate::primefield::PrimeField;

/// A fraction `num / den` in lowest terms with a monic denominator. Zero is
/// `0 / 1`. Every constructor normalizes, so `==` is field equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    /// Canonicalizing constructor.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let nvars = num.nvars().max(den.nvars());
        if num.is_zero() {
            return Ok(Self::zero(num.field(), nvars));
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        Ok(Self::scaled_monic(num, den))
    }

    fn scaled_monic(num: MultiPoly, den: MultiPoly) -> Self {
        let nvars = num.nvars().max(den.nvars());
        let lc = den.leading_coeff().expect("nonzero denominator");
        let (num, den) = if lc.value() == 1 {
            (num, den)
        } else {
            let inv = lc.inv().expect("nonzero").value();
            (num.scale(inv), den.scale(inv))
        };
        RatFunc {
            num: num.with_nvars(nvars),
            den: den.with_nvars(nvars),
        }
    }

    pub fn from_poly(num: MultiPoly) -> Self {
        let den = MultiPoly::one(num.field(), num.nvars());
        RatFunc { num, den }
    }

    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        Self::from_poly(MultiPoly::zero(field, nvars))
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::from_poly(MultiPoly::one(field, nvars))
    }

    pub fn constant(field: PrimeField, nvars: usize, c: i64) -> Self {
        Self::from_poly(MultiPoly::constant(field, nvars, c))
    }

    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Result<Self> {
        Ok(Self::from_poly(MultiPoly::var(field, nvars, i)?))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn field(&self) -> PrimeField {
        self.num.field()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Constant value, if the function is a constant.
    pub fn constant_value(&self) -> Option<u32> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone().widen(self.nvars()));
        }
        if other.is_zero() {
            return Ok(self.clone().widen(other.nvars()));
        }
        if self.den == other.den {
            return RatFunc::new(self.num.add(&other.num), self.den.clone());
        }
        // gcd(a d' + c b', b d') = gcd(a d' + c b', g) when g = gcd(b, d)
        let g = self.den.gcd(&other.den)?;
        let b1 = self.den.exact_div(&g)?;
        let d1 = other.den.exact_div(&g)?;
        let num = self.num.mul(&d1).add(&other.num.mul(&b1));
        let den = self.den.mul(&d1);
        if num.is_zero() {
            return Ok(Self::zero(self.field(), den.nvars()));
        }
        if g.is_one() {
            return Ok(Self::scaled_monic(num, den));
        }
        let h = num.gcd(&g)?;
        if h.is_one() {
            return Ok(Self::scaled_monic(num, den));
        }
        Ok(Self::scaled_monic(num.exact_div(&h)?, den.exact_div(&h)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            let nvars = self.nvars().max(other.nvars());
            return Ok(Self::zero(self.field(), nvars));
        }
        let g1 = self.num.gcd(&other.den)?;
        let g2 = other.num.gcd(&self.den)?;
        let cancel = |p: &MultiPoly, g: &MultiPoly| -> Result<MultiPoly> {
            if g.is_one() {
                Ok(p.clone())
            } else {
                p.exact_div(g)
            }
        };
        let num = cancel(&self.num, &g1)?.mul(&cancel(&other.num, &g2)?);
        let den = cancel(&self.den, &g2)?.mul(&cancel(&other.den, &g1)?);
        Ok(Self::scaled_monic(num, den))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::scaled_monic(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        // coprime parts stay coprime under powers
        Ok(RatFunc {
            num: base.num.pow(e.unsigned_abs()),
            den: base.den.pow(e.unsigned_abs()),
        })
    }

    /// Applies `g -> g(x1^p, ..., xd^p)` to both parts; stays canonical.
    pub fn frobenius_substitute(&self) -> Result<Self> {
        Ok(RatFunc {
            num: self.num.frobenius_substitute()?,
            den: self.den.frobenius_substitute()?,
        })
    }

    /// Multiplies every exponent of both parts by `factor`; stays canonical.
    pub fn scale_exponents(&self, factor: u64) -> Result<Self> {
        Ok(RatFunc {
            num: self.num.scale_exponents(factor)?,
            den: self.den.scale_exponents(factor)?,
        })
    }

    /// Whether every exponent in both parts is divisible by `p`.
    pub fn is_pth_power(&self) -> bool {
        self.num.is_pth_power() && self.den.is_pth_power()
    }

    /// Inverse of [`RatFunc::frobenius_substitute`].
    pub fn pth_root(&self) -> Result<Self> {
        Ok(RatFunc {
            num: self.num.pth_root()?,
            den: self.den.pth_root()?,
        })
    }

    pub fn max_exponent(&self) -> u64 {
        self.num.max_exponent().max(self.den.max_exponent())
    }

    pub fn eval(&self, point: &[FqElem]) -> Result<FqElem> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        let n = self.num.eval(point)?;
        n.div(&d)
    }

    fn widen(self, nvars: usize) -> Self {
        RatFunc {
            num: self.num.with_nvars(nvars),
            den: self.den.with_nvars(nvars),
        }
    }

    /// Text form with caller-chosen variable names; see
    /// [`MultiPoly::format_with`].
    pub fn format_with(&self, var: &dyn Fn(usize) -> String) -> String {
        let num = self.num.format_with(var);
        if self.den.is_one() {
            return num;
        }
        let den = self.den.format_with(var);
        let num = if self.num.num_terms() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den_is_atom = self.den.num_terms() == 1 && !den.contains('*');
        let den = if den_is_atom { den } else { format!("({den})") };
        format!("{num} / {den}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&|i| format!("x{}", i + 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqtower::FqField;
    use crate::multipoly::test_support::poly;
    use crate::multipoly::Monomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rf(p: u64, n: usize, num: &str, den: &str) -> RatFunc {
        RatFunc::new(poly(p, n, num), poly(p, n, den)).unwrap()
    }

    #[test]
    fn constructor_examples() {
        let a = rf(5, 2, "x1^2 - x2^2", "x1 - x2");
        assert_eq!(a.num(), &poly(5, 2, "x1 + x2"));
        assert!(a.den().is_one());
        assert!(rf(2, 1, "x1", "x1").is_one());
        let c = rf(3, 1, "2*x1", "2");
        assert_eq!((c.num(), c.den().is_one()), (&poly(3, 1, "x1"), true));
        let z = RatFunc::new(
            poly(3, 1, "x1"),
            MultiPoly::zero(PrimeField::new(3).unwrap(), 1),
        );
        assert_eq!(z, Err(Error::ZeroDenominator));
        let zero = rf(7, 1, "0", "x1 + 3");
        assert!(zero.is_zero() && zero.den().is_one());
    }

    #[test]
    fn arith_examples() {
        let inv_x = rf(2, 1, "1", "x1");
        assert!(inv_x.add(&inv_x).unwrap().is_zero());
        let a = rf(3, 1, "1", "x1").mul(&rf(3, 1, "x1", "1")).unwrap();
        assert!(a.is_one());
        // 1/(y-1) + 1/(y+1): common denominator by hand gives
        // ((y+1) + (y-1)) / (y^2 - 1) = 2y / (y^2 + 4) mod 5
        let s = rf(5, 1, "1", "x1 - 1")
            .add(&rf(5, 1, "1", "x1 + 1"))
            .unwrap();
        assert_eq!(s.num(), &poly(5, 1, "2*x1"));
        assert_eq!(s.den(), &poly(5, 1, "x1^2 + 4"));
        // cross-multiplication oracle
        let lhs = s.num().mul(&poly(5, 1, "x1^2 - 1"));
        assert_eq!(lhs, poly(5, 1, "x1 + 1 + x1 - 1").mul(s.den()));
        assert_eq!(
            rf(5, 1, "x1", "1").div(&RatFunc::zero(s.field(), 1)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn eval_examples() {
        let f3 = FqField::new(3, 1).unwrap();
        assert_eq!(
            rf(3, 1, "x1", "1").eval(&[f3.constant(2)]).unwrap(),
            f3.constant(2)
        );
        let f2 = FqField::new(2, 1).unwrap();
        assert_eq!(
            rf(2, 1, "1", "x1").eval(&[f2.zero()]),
            Err(Error::PoleAtPoint)
        );
        let f5 = FqField::new(5, 1).unwrap();
        let v = rf(5, 2, "x1 + x2", "x1 - x2")
            .eval(&[f5.constant(3), f5.constant(1)])
            .unwrap();
        // (3+1) * inv(3-1) = 4 * 3 = 12 = 2 mod 5
        assert_eq!(v, f5.constant(2));
    }

    #[test]
    fn display() {
        assert_eq!(
            rf(5, 1, "1", "x1 - 1")
                .add(&rf(5, 1, "1", "x1 + 1"))
                .unwrap()
                .to_string(),
            "2*x1 / (x1^2 + 4)"
        );
        assert_eq!(
            rf(3, 2, "x1 + 1", "x1*x2").to_string(),
            "(x1 + 1) / (x1*x2)"
        );
        assert_eq!(rf(3, 2, "x1", "x2^2").to_string(), "x1 / x2^2");
        assert_eq!(rf(3, 2, "x1 + x2", "1").to_string(), "x1 + x2");
    }

    fn random_poly(
        rng: &mut ChaCha8Rng,
        k: PrimeField,
        nvars: usize,
        max_deg: u64,
        max_terms: usize,
    ) -> MultiPoly {
        let n = rng.gen_range(1..=max_terms);
        let terms = (0..n)
            .map(|_| {
                let exps = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
                (Monomial::new(exps), rng.gen_range(0..k.p()))
            })
            .collect();
        MultiPoly::from_terms(k, nvars, terms)
    }

    fn random_rf(rng: &mut ChaCha8Rng, k: PrimeField, nvars: usize) -> RatFunc {
        loop {
            let den = random_poly(rng, k, nvars, 2, 3);
            if den.is_zero() {
                continue;
            }
            return RatFunc::new(random_poly(rng, k, nvars, 2, 3), den).unwrap();
        }
    }

    #[test]
    fn normalization_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..300 {
            let k = PrimeField::new([2, 3, 5][i % 3]).unwrap();
            let a = random_rf(&mut rng, k, 2);
            let b = random_rf(&mut rng, k, 2);
            // idempotent
            assert_eq!(RatFunc::new(a.num().clone(), a.den().clone()).unwrap(), a);
            assert!(a.den().is_monic());
            assert!(a.is_zero() || a.num().gcd(a.den()).unwrap().is_one());
            let cross = a.num().mul(b.den()) == b.num().mul(a.den());
            assert_eq!(a == b, cross);
            // same element through a different route
            let c = random_rf(&mut rng, k, 2);
            if !c.is_zero() {
                assert_eq!(a.mul(&c).unwrap().div(&c).unwrap(), a);
            }
            assert_eq!(a.add(&c).unwrap().sub(&c).unwrap(), a);
        }
    }

    #[test]
    fn field_axioms_with_evaluation_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let fields: Vec<(PrimeField, FqField)> = [2u64, 3, 5]
            .iter()
            .map(|&p| (PrimeField::new(p).unwrap(), FqField::new(p, 8).unwrap()))
            .collect();
        for i in 0..90 {
            let (k, big) = &fields[i % 3];
            let (a, b, c) = (
                random_rf(&mut rng, *k, 2),
                random_rf(&mut rng, *k, 2),
                random_rf(&mut rng, *k, 2),
            );
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let assoc_l = a.add(&b).unwrap().add(&c).unwrap();
            let assoc_r = a.add(&b.add(&c).unwrap()).unwrap();
            assert_eq!(assoc_l, assoc_r);
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let mut checked = 0;
            while checked < 5 {
                let pt: Vec<FqElem> = (0..2)
                    .map(|_| big.element(rng.gen_range(0..big.size())))
                    .collect();
                let vals = (a.eval(&pt), b.eval(&pt), c.eval(&pt), lhs.eval(&pt));
                let (Ok(va), Ok(vb), Ok(vc), Ok(vl)) = vals else {
                    continue;
                };
                assert_eq!(vl, &va * &(&vb + &vc));
                checked += 1;
            }
        }
    }
}
