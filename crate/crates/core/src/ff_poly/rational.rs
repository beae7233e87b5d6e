use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{inv_mod, Poly};
use crate::{Error, Result};

/// An element of `F_p(t)` in lowest terms with a monic denominator.
///
/// Because the representation is canonical, derived equality and hashing are exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Reduces `num/den` to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = num.characteristic();
        if num.is_zero() {
            return Ok(Self::zero(p));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let c = inv_mod(den.lc(), p);
        Ok(RationalFunction { num: num.scale(c), den: den.scale(c) })
    }

    pub fn from_poly(num: Poly) -> Self {
        let p = num.characteristic();
        RationalFunction { num, den: Poly::one(p) }
    }

    pub fn zero(p: u32) -> Self {
        Self::from_poly(Poly::zero(p))
    }

    pub fn one(p: u32) -> Self {
        Self::from_poly(Poly::one(p))
    }

    pub fn constant(p: u32, c: i64) -> Self {
        Self::from_poly(Poly::from_coeffs(p, &[c]))
    }

    pub fn t(p: u32) -> Self {
        Self::from_poly(Poly::t(p))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn characteristic(&self) -> u32 {
        self.num.characteristic()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Integer powers; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let k = e.unsigned_abs() as usize;
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    /// Substitutes `t = (a*t + b) / (c*t + d)` where `num = a*t + b`, `den = c*t + d`
    /// have degree at most one and `num/den` is not constant.
    pub fn compose_mobius(&self, num: &Poly, den: &Poly) -> Self {
        let m = self.num.degree().unwrap_or(0);
        let n = self.den.degree().unwrap_or(0);
        let top = self.num.homogeneous_substitute(num, den, m);
        let bottom = self.den.homogeneous_substitute(num, den, n);
        // f(x) = top / den^m  /  (bottom / den^n)
        let (top, bottom) = if n >= m {
            (&top * &den.pow(n - m), bottom)
        } else {
            (top, &bottom * &den.pow(m - n))
        };
        Self::new(top, bottom).expect("mobius substitution keeps the denominator nonzero")
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).unwrap()
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.characteristic());
        }
        // Cross-cancel first to keep the intermediate degrees small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.div_exact(&g1) * &rhs.num.div_exact(&g2);
        let den = &self.den.div_exact(&g2) * &rhs.den.div_exact(&g1);
        RationalFunction::new(num, den).unwrap()
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; see [`RationalFunction::checked_div`].
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("rational function division by zero")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.coeffs().iter().filter(|&&c| c != 0).count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(p: u32, n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_coeffs(p, n), Poly::from_coeffs(p, d)).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = rf(3, &[2, 2], &[2, 2, 0]); // (2+2t)/(2+2t) = 1
        assert!(a.is_one());
        let b = rf(5, &[1], &[0, 2]); // 1/(2t) = 3/t
        assert!(b.denominator().is_monic());
        assert_eq!(b.numerator().coeffs(), &[3]);
        assert!(RationalFunction::new(Poly::one(2), Poly::zero(2)).is_err());
    }

    #[test]
    fn field_axioms_on_examples() {
        let p = 7;
        let a = rf(p, &[1, 2, 3], &[4, 0, 1]);
        let b = rf(p, &[0, 5], &[1, 1]);
        let c = rf(p, &[6, 1], &[2]);
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert!((&a / &a).is_one());
        assert!((&a - &a).is_zero());
        assert_eq!(a.pow(-2).unwrap(), (&a * &a).inverse().unwrap());
    }

    #[test]
    fn mobius_composition_inverts() {
        // x = (t+1)/(t+2) over F_5 and back: t = (2x - 1)/(1 - x) = (2x + 4)/(4x + 1)
        let p = 5;
        let f = rf(p, &[3, 0, 1], &[1, 1, 1, 1]);
        let fwd = f.compose_mobius(&Poly::from_coeffs(p, &[1, 1]), &Poly::from_coeffs(p, &[2, 1]));
        let back = fwd.compose_mobius(&Poly::from_coeffs(p, &[4, 2]), &Poly::from_coeffs(p, &[1, 4]));
        assert_eq!(back, f);
    }
}
