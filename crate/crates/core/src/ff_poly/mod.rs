//! Exact arithmetic over prime fields `F_p`: polynomials, rational functions in `t`,
//! places of `F_p(t)`, valuations and S-integer membership.

mod factor;
mod parse;
mod place;
mod rational;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use factor::{factor, is_irreducible, Factorization};
pub use parse::parse_rational;
pub use place::{is_s_integer, unit_factorization, valuation, Place, PlaceSet, UnitFactorization};
pub use rational::RationalFunction;

/// Largest characteristic accepted; keeps products of residues inside `u64`.
pub const MAX_PRIME: u32 = 1 << 31;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut q = 2u64;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if p < MAX_PRIME && is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{p} is not a supported prime")))
    }
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

pub(crate) fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue (Fermat).
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p as u64 - 2, p)
}

/// An element of the prime field `F_p`, always fully reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    residue: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: i64, p: u32) -> Self {
        let residue = value.rem_euclid(p as i64) as u32;
        FieldElement { residue, modulus: p }
    }

    pub fn residue(self) -> u32 {
        self.residue
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    pub fn inverse(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement { residue: inv_mod(self.residue, self.modulus), ..self })
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement { residue: add_mod(self.residue, rhs.residue, self.modulus), ..self }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        FieldElement { residue: sub_mod(self.residue, rhs.residue, self.modulus), ..self }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        FieldElement { residue: mul_mod(self.residue, rhs.residue, self.modulus), ..self }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { residue: sub_mod(0, self.residue, self.modulus), ..self }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// A dense polynomial over `F_p` in the variable `t`, coefficients indexed by degree.
///
/// The coefficient vector never has trailing zeros, so the zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    p: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Builds a polynomial from arbitrary integer coefficients (reduced mod `p`).
    pub fn from_coeffs(p: u32, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect();
        Self::from_residues(p, coeffs)
    }

    /// Builds a polynomial from residues that are already in `0..p`.
    pub fn from_residues(p: u32, mut coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < p));
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn zero(p: u32) -> Self {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u32, c: u32) -> Self {
        Self::from_residues(p, vec![c % p])
    }

    /// `c * t^k`.
    pub fn monomial(p: u32, c: u32, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c % p;
        Self::from_residues(p, coeffs)
    }

    /// The variable `t`.
    pub fn t(p: u32) -> Self {
        Self::monomial(p, 1, 1)
    }

    /// `t - c`, the monic linear polynomial vanishing at `c`.
    pub fn linear(p: u32, c: u32) -> Self {
        Self::from_residues(p, vec![sub_mod(0, c % p, p), 1])
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `-1` standing in for the zero polynomial.
    pub fn degree_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Leading coefficient, 0 for the zero polynomial.
    pub fn lc(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u32) -> Poly {
        let c = c % self.p;
        if c == 0 {
            return Poly::zero(self.p);
        }
        Poly { p: self.p, coeffs: self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect() }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { p: self.p, coeffs }
    }

    /// Number of factors `t` dividing `self`; `None` for zero.
    pub fn t_adic_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    /// Divides by `t^k`, which must divide `self`.
    pub fn unshift(&self, k: usize) -> Poly {
        debug_assert!(self.coeffs.iter().take(k).all(|&c| c == 0));
        Poly::from_residues(self.p, self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn eval(&self, x: u32) -> u32 {
        self.coeffs.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, self.p), c, self.p))
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, (i as u64 % self.p as u64) as u32, self.p))
            .collect();
        Poly::from_residues(self.p, coeffs)
    }

    pub fn pow(&self, mut e: usize) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Poly) -> Poly {
        let mut base = self.rem(modulus);
        let mut acc = Poly::one(self.p).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(modulus);
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rem(modulus);
            }
        }
        acc
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let inv_lc = inv_mod(divisor.lc(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dd], inv_lc, p);
            quot[i] = c;
            if c != 0 {
                for (j, &dj) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = sub_mod(rem[i + j], mul_mod(c, dj, p), p);
                }
            }
        }
        rem.truncate(dd);
        (Poly::from_residues(p, quot), Poly::from_residues(p, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Quotient when `divisor` is known to divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `factor` (non-constant) in `self` and the cofactor.
    pub fn split_off(&self, factor: &Poly) -> (usize, Poly) {
        debug_assert!(!factor.is_constant());
        let mut count = 0;
        let mut rest = self.clone();
        loop {
            let (q, r) = rest.div_rem(factor);
            if !r.is_zero() || rest.is_zero() {
                return (count, rest);
            }
            rest = q;
            count += 1;
        }
    }

    /// `Σ c_i num^i den^(n-i)`: the numerator of `self(num/den)` over `den^n`, `n >= deg self`.
    pub fn homogeneous_substitute(&self, num: &Poly, den: &Poly, n: usize) -> Poly {
        debug_assert!(self.degree().is_none_or(|d| d <= n));
        let p = self.p;
        let mut den_pows = Vec::with_capacity(n + 1);
        den_pows.push(Poly::one(p));
        for i in 0..n {
            den_pows.push(&den_pows[i] * den);
        }
        let mut acc = Poly::zero(p);
        let mut num_pow = Poly::one(p);
        for i in 0..=n {
            let c = self.coeff(i);
            if c != 0 {
                acc = &acc + &(&num_pow * &den_pows[n - i]).scale(c);
            }
            if i < n {
                num_pow = &num_pow * num;
            }
        }
        acc
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        debug_assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| add_mod(self.coeff(i), rhs.coeff(i), self.p)).collect();
        Poly::from_residues(self.p, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        debug_assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| sub_mod(self.coeff(i), rhs.coeff(i), self.p)).collect();
        Poly::from_residues(self.p, coeffs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        debug_assert_eq!(self.p, rhs.p);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p as u64;
        // Accumulate in u64 and reduce lazily; p < 2^31 so each product is < 2^62.
        let mut acc = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Poly::from_residues(self.p, acc.into_iter().map(|c| c as u32).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::zero(self.p) - self.clone()
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl fmt::Display for Poly {
    /// Ascending powers, e.g. `1+t+t^2`, `2*t^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}
