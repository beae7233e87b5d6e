//! Eventually periodic Laurent series `Σ c_i π^i` over `F_p`, the completion of `F_p(t)` at a
//! degree-one place `s`.
//!
//! Expansion substitutes `t = M⁻¹(u)` where `π = M(t)` is a Möbius transformation; the place
//! `s` becomes `u = 0` and the digits are produced by power-series long division in `u`.
//! A remainder that repeats marks the start of the period.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ff_poly::{
    check_prime, inv_mod, is_s_integer, mul_mod, valuation, Place, PlaceSet, Poly,
    RationalFunction,
};
use crate::periodic;
use crate::{Error, Result};

/// The data `(p, s, S, π)` fixing a completion and an embedding `O_S ⊂ F_p[[π]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionContext {
    p: u32,
    s: Place,
    places: PlaceSet,
    pi: RationalFunction,
    /// `t = inv_num(π) / inv_den(π)`.
    inv_num: Poly,
    inv_den: Poly,
}

impl CompletionContext {
    /// Validates `s` (degree one, not in `S`) and `π` (a uniformizer at `s` lying in `O_S`).
    ///
    /// `π` must also generate `F_p(t)`, i.e. be a Möbius transformation of `t`; otherwise
    /// rational functions of `t` need not have eventually periodic `π`-adic digits.
    pub fn new(p: u32, s: Place, places: PlaceSet, pi: RationalFunction) -> Result<Self> {
        check_prime(p)?;
        if pi.characteristic() != p {
            return Err(Error::InvalidContext("π has the wrong characteristic".into()));
        }
        if s.degree() != 1 {
            return Err(Error::InvalidContext(format!("place {s} does not have degree 1")));
        }
        if places.contains(&s) {
            return Err(Error::InvalidContext(format!("{s} lies in S = {places}")));
        }
        if valuation(&pi, &s) != Some(1) {
            return Err(Error::InvalidContext(format!("π = {pi} is not a uniformizer at {s}")));
        }
        if !is_s_integer(&pi, &places) {
            return Err(Error::InvalidContext(format!("π = {pi} is not an S-integer")));
        }
        let (num, den) = (pi.numerator(), pi.denominator());
        if num.degree_i64() > 1 || den.degree_i64() > 1 {
            return Err(Error::InvalidContext(format!("π = {pi} is not a Möbius transform of t")));
        }
        // π = (a t + b)/(c t + d)  =>  t = (d π - b)/(a - c π)
        let (a, b) = (num.coeff(1), num.coeff(0));
        let (c, d) = (den.coeff(1), den.coeff(0));
        let neg = |x: u32| (p - x % p) % p;
        let inv_num = Poly::from_residues(p, vec![neg(b), d]);
        let inv_den = Poly::from_residues(p, vec![a, neg(c)]);
        Ok(CompletionContext { p, s, places, pi, inv_num, inv_den })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn place(&self) -> &Place {
        &self.s
    }

    pub fn places(&self) -> &PlaceSet {
        &self.places
    }

    pub fn pi(&self) -> &RationalFunction {
        &self.pi
    }

    /// `f` rewritten as a rational function of `u = π`.
    fn to_u(&self, f: &RationalFunction) -> RationalFunction {
        f.compose_mobius(&self.inv_num, &self.inv_den)
    }

    /// A rational function of `u` evaluated at `u = π`.
    fn in_t(&self, g: &RationalFunction) -> RationalFunction {
        g.compose_mobius(self.pi.numerator(), self.pi.denominator())
    }

    /// The `π`-adic expansion of `f` at `s`.
    pub fn expand(&self, f: &RationalFunction) -> EpSeries {
        EpSeries::from_u_rational(&self.to_u(f))
    }

    /// The rational function with the given expansion.
    pub fn to_rational(&self, a: &EpSeries) -> RationalFunction {
        self.in_t(&a.to_u_rational())
    }

    /// The value `f(s)`, which is the constant digit of the expansion. Panics if `f` has a pole
    /// at `s`.
    pub fn residue(&self, f: &RationalFunction) -> u32 {
        let p = self.p;
        let (num, den) = (f.numerator(), f.denominator());
        match &self.s {
            Place::Finite(g) => {
                let c = (p - g.coeff(0)) % p;
                let d = den.eval(c);
                assert!(d != 0, "{f} has a pole at {}", self.s);
                mul_mod(num.eval(c), inv_mod(d, p), p)
            }
            Place::Infinity => {
                assert!(num.degree_i64() <= den.degree_i64(), "{f} has a pole at infinity");
                if num.degree_i64() < den.degree_i64() {
                    0
                } else {
                    mul_mod(num.lc(), inv_mod(den.lc(), p), p)
                }
            }
        }
    }
}

impl fmt::Display for CompletionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}, s={}, S={}, pi={}", self.p, self.s, self.places, self.pi)
    }
}

/// `π^offset · (pre · per^ω)` in canonical form.
///
/// The period is primitive, the preperiod is as short as possible and, for nonzero series,
/// the first digit is nonzero, so `offset` is the valuation. Zero is `π^0 · (| 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpSeries {
    p: u32,
    offset: i64,
    pre: Vec<u32>,
    per: Vec<u32>,
}

impl EpSeries {
    /// Builds and canonicalizes a series; digits are reduced mod `p`.
    pub fn new(p: u32, offset: i64, pre: Vec<u32>, per: Vec<u32>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::InvalidInput("period must be non-empty".into()));
        }
        let pre = pre.into_iter().map(|c| c % p).collect();
        let per = per.into_iter().map(|c| c % p).collect();
        Ok(Self::canonical(p, offset, pre, per))
    }

    pub fn zero(p: u32) -> Self {
        EpSeries { p, offset: 0, pre: Vec::new(), per: vec![0] }
    }

    /// A finite series `Σ digits[i] π^(offset+i)`.
    pub fn finite(p: u32, offset: i64, digits: Vec<u32>) -> Self {
        Self::canonical(p, offset, digits.into_iter().map(|c| c % p).collect(), vec![0])
    }

    fn canonical(p: u32, mut offset: i64, pre: Vec<u32>, per: Vec<u32>) -> Self {
        let (mut pre, mut per) = periodic::canonicalize(pre, per);
        let leading = pre.iter().take_while(|&&c| c == 0).count();
        pre.drain(..leading);
        offset += leading as i64;
        if pre.is_empty() {
            if per.iter().all(|&c| c == 0) {
                return Self::zero(p);
            }
            while per[0] == 0 {
                per.rotate_left(1);
                offset += 1;
            }
        }
        EpSeries { p, offset, pre, per }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.pre
    }

    pub fn period(&self) -> &[u32] {
        &self.per
    }

    pub fn is_zero(&self) -> bool {
        self.pre.is_empty() && self.per == [0]
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.offset)
    }

    /// The coefficient of `π^i`.
    pub fn digit(&self, i: i64) -> u32 {
        if self.is_zero() || i < self.offset {
            return 0;
        }
        periodic::nth(&self.pre, &self.per, (i - self.offset) as usize)
    }

    /// Coefficients of `π^lo, …, π^(hi-1)`.
    pub fn digits(&self, lo: i64, hi: i64) -> Vec<u32> {
        (lo..hi).map(|i| self.digit(i)).collect()
    }

    /// Whether all digits have index ≥ 0, i.e. the series lies in `F_p[[π]]`.
    pub fn is_integral(&self) -> bool {
        self.is_zero() || self.offset >= 0
    }

    /// `[a]_lo^hi = Σ_{lo ≤ i < hi} c_i π^i`; `None` drops the corresponding bound.
    pub fn truncate(&self, lo: Option<i64>, hi: Option<i64>) -> EpSeries {
        if self.is_zero() {
            return self.clone();
        }
        let start = lo.map_or(self.offset, |lo| lo.max(self.offset));
        match hi {
            Some(hi) if hi <= start => EpSeries::zero(self.p),
            Some(hi) => EpSeries::finite(self.p, start, self.digits(start, hi)),
            None => {
                let (pre, per) =
                    periodic::suffix(&self.pre, &self.per, (start - self.offset) as usize);
                Self::canonical(self.p, start, pre, per)
            }
        }
    }

    /// Multiplication by `π^(-e)`.
    pub fn shift(&self, e: i64) -> EpSeries {
        if self.is_zero() {
            return self.clone();
        }
        EpSeries { offset: self.offset - e, ..self.clone() }
    }

    /// Digitwise sum, aligned on a common preperiod and the lcm of the periods.
    pub fn add(&self, other: &EpSeries) -> EpSeries {
        assert_eq!(self.p, other.p, "characteristic mismatch");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let start = (self.offset + self.pre.len() as i64).max(other.offset + other.pre.len() as i64);
        let len = lcm(self.per.len(), other.per.len()) as i64;
        let sum = |i: i64| (self.digit(i) + other.digit(i)) % self.p;
        let pre = (lo..start).map(sum).collect();
        let per = (start..start + len).map(sum).collect();
        Self::canonical(self.p, lo, pre, per)
    }

    pub fn neg(&self) -> EpSeries {
        let p = self.p;
        let flip = |v: &[u32]| v.iter().map(|&c| (p - c) % p).collect();
        Self::canonical(p, self.offset, flip(&self.pre), flip(&self.per))
    }

    /// Product. A finite factor is multiplied in digit by digit; otherwise both sides go
    /// through their representations as rational functions of `π`.
    pub fn mul(&self, other: &EpSeries) -> EpSeries {
        assert_eq!(self.p, other.p, "characteristic mismatch");
        let (finite, rest) = match (self.is_finite(), other.is_finite()) {
            (true, _) => (self, other),
            (_, true) => (other, self),
            _ => return Self::from_u_rational(&(&self.to_u_rational() * &other.to_u_rational())),
        };
        let mut acc = EpSeries::zero(self.p);
        for (i, &c) in finite.pre.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&rest.scale(c).shift(-(finite.offset + i as i64)));
            }
        }
        acc
    }

    fn is_finite(&self) -> bool {
        self.per == [0]
    }

    fn scale(&self, c: u32) -> EpSeries {
        let p = self.p;
        let times = |v: &[u32]| v.iter().map(|&x| x * c % p).collect();
        Self::canonical(p, self.offset, times(&self.pre), times(&self.per))
    }

    pub fn unit_inverse(&self) -> Result<EpSeries> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_u_rational(&self.to_u_rational().inverse()?))
    }

    /// `u^offset (P(u)(1 - u^ℓ) + u^m Q(u)) / (1 - u^ℓ)` with `P`, `Q` the digit polynomials.
    fn to_u_rational(&self) -> RationalFunction {
        let p = self.p;
        if self.is_zero() {
            return RationalFunction::zero(p);
        }
        let pre = Poly::from_residues(p, self.pre.clone());
        let per = Poly::from_residues(p, self.per.clone());
        let denom = &Poly::one(p) - &Poly::monomial(p, 1, self.per.len());
        let num = &(&pre * &denom) + &per.shift(self.pre.len());
        let body = RationalFunction::new(num, denom).expect("1 - u^l is nonzero");
        let scale = RationalFunction::t(p).pow(self.offset).expect("u is nonzero");
        &body * &scale
    }

    /// Long division of `u^v N(u)/D(u)` with `N(0), D(0) ≠ 0`.
    fn from_u_rational(f: &RationalFunction) -> EpSeries {
        let p = f.characteristic();
        if f.is_zero() {
            return EpSeries::zero(p);
        }
        let (num, den) = (f.numerator(), f.denominator());
        let vn = num.t_adic_valuation().unwrap();
        let vd = den.t_adic_valuation().unwrap();
        let num = num.unshift(vn);
        let den = den.unshift(vd);
        let inv_d0 = inv_mod(den.coeff(0), p);
        let mut seen: HashMap<Poly, usize> = HashMap::new();
        let mut digits = Vec::new();
        let mut r = num;
        let start = loop {
            if let Some(&j) = seen.get(&r) {
                break j;
            }
            seen.insert(r.clone(), digits.len());
            let c = mul_mod(r.coeff(0), inv_d0, p);
            digits.push(c);
            r = (&r - &den.scale(c)).unshift(1);
        };
        let per = digits.split_off(start);
        Self::canonical(p, vn as i64 - vd as i64, digits, per)
    }

    /// Parses `pi^v * (d0 d1 … | p0 p1 …)`; the `pi^v *` prefix may be omitted.
    pub fn parse(p: u32, text: &str) -> Result<EpSeries> {
        let bad = || Error::Parse(format!("malformed series `{text}`"));
        let text = text.trim();
        let (offset, body) = match text.split_once('*') {
            Some((head, body)) => {
                let v = head.trim().strip_prefix("pi^").ok_or_else(bad)?;
                (v.trim().parse::<i64>().map_err(|_| bad())?, body.trim())
            }
            None => (0, text),
        };
        let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (pre, per) = body.split_once('|').ok_or_else(bad)?;
        let digits = |s: &str| -> Result<Vec<u32>> {
            s.split_whitespace()
                .map(|d| d.parse::<u32>().ok().filter(|&d| d < p).ok_or_else(bad))
                .collect()
        };
        EpSeries::new(p, offset, digits(pre)?, digits(per)?)
    }
}

impl fmt::Display for EpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "pi^{} * ({} | {})", self.offset, join(&self.pre), join(&self.per))
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_poly::parse_rational;

    fn example_ctx() -> CompletionContext {
        let places = PlaceSet::new([
            Place::Infinity,
            Place::parse(2, "t").unwrap(),
            Place::parse(2, "1+t+t^2").unwrap(),
        ])
        .unwrap();
        let pi = parse_rational(2, "1+t").unwrap();
        CompletionContext::new(2, Place::parse(2, "1+t").unwrap(), places, pi).unwrap()
    }

    fn q(text: &str) -> RationalFunction {
        parse_rational(2, text).unwrap()
    }

    #[test]
    fn context_validation() {
        let places = PlaceSet::new([Place::Infinity]).unwrap();
        let s = Place::parse(2, "1+t").unwrap();
        assert!(CompletionContext::new(2, s.clone(), places.clone(), q("t")).is_err());
        assert!(CompletionContext::new(2, s.clone(), places.clone(), q("(1+t)^2")).is_err());
        assert!(CompletionContext::new(2, Place::Infinity, places.clone(), q("1/t")).is_err());
        let only_t = PlaceSet::new([Place::parse(2, "t").unwrap()]).unwrap();
        // 1+t has a pole at infinity, which is outside {t}
        assert!(CompletionContext::new(2, s.clone(), only_t.clone(), q("1+t")).is_err());
        assert!(CompletionContext::new(2, s, only_t, q("(1+t)/t")).is_ok());
    }

    #[test]
    fn expansion_examples() {
        let ctx = example_ctx();
        let pi = ctx.expand(ctx.pi());
        assert_eq!((pi.offset(), pi.preperiod(), pi.period()), (1, &[1][..], &[0][..]));
        let t = ctx.expand(&q("t"));
        assert_eq!((t.offset(), t.preperiod(), t.period()), (0, &[1, 1][..], &[0][..]));
        for f in ["t", "1/t", "t^2/(1+t+t^2)", "(1+t)/t"] {
            assert_eq!(ctx.residue(&q(f)), ctx.expand(&q(f)).digit(0), "{f}");
        }
        assert_eq!(ctx.expand(&q("0")), EpSeries::zero(2));
        assert_eq!(ctx.to_rational(&EpSeries::finite(2, 0, vec![1])), q("1"));
        assert_eq!(ctx.to_rational(&EpSeries::zero(2)), q("0"));
        // 1/(1+π) = 1/t = 1 + π + π^2 + …
        let inv_t = ctx.expand(&q("1/t"));
        assert_eq!((inv_t.preperiod(), inv_t.period()), (&[][..], &[1][..]));
    }

    #[test]
    fn period_of_geometric_quotients() {
        let ctx = example_ctx();
        for n in 1..6 {
            // β/(π^(n+f) - π^f) with β = 1, f = 0: period exactly n
            let pi_n = ctx.pi().pow(n).unwrap();
            let f = (&pi_n - &RationalFunction::one(2)).inverse().unwrap();
            assert_eq!(ctx.expand(&f).period().len(), n as usize);
        }
    }

    #[test]
    fn truncation_and_shift() {
        let ctx = example_ctx();
        let t = ctx.expand(&q("t"));
        assert_eq!(t.truncate(None, Some(1)), EpSeries::finite(2, 0, vec![1]));
        assert_eq!(t.truncate(Some(2), None), EpSeries::zero(2));
        let cube = ctx.expand(&ctx.pi().pow(3).unwrap());
        assert_eq!(cube.shift(2), pi_series(&ctx));
        assert_eq!(cube.shift(5).shift(-5), cube);
        assert_eq!(EpSeries::zero(2).shift(3), EpSeries::zero(2));
    }

    fn pi_series(ctx: &CompletionContext) -> EpSeries {
        ctx.expand(ctx.pi())
    }

    #[test]
    fn arithmetic_examples() {
        let ctx = example_ctx();
        let g = ctx.expand(&q("1+t+t^2"));
        assert_eq!(g.unit_inverse().unwrap(), ctx.expand(&q("(1+t+t^2)^-1")));
        let one = EpSeries::finite(2, 0, vec![1]);
        assert_eq!(g.mul(&one), g);
        assert_eq!(g.add(&EpSeries::zero(2)), g);
        assert!(g.add(&g).is_zero());
        assert!(EpSeries::zero(2).unit_inverse().is_err());
    }

    #[test]
    fn text_form_round_trips() {
        let a = EpSeries::new(3, -2, vec![1, 2], vec![0, 1]).unwrap();
        assert_eq!(a.to_string(), "pi^-2 * (1 2 | 0 1)");
        assert_eq!(EpSeries::parse(3, &a.to_string()).unwrap(), a);
        assert_eq!(EpSeries::parse(3, "( | 0)").unwrap(), EpSeries::zero(3));
        assert!(EpSeries::parse(3, "pi^1 * (3 | 0)").is_err());
    }

    #[test]
    fn expansion_at_infinity() {
        // π = 1/t at ∞ with S = {t}: t/(t-1) = 1/(1-π) = 1 + π + π^2 + …
        let p = 3;
        let places = PlaceSet::new([Place::at(p, 0)]).unwrap();
        let ctx = CompletionContext::new(
            p,
            Place::Infinity,
            places,
            parse_rational(p, "1/t").unwrap(),
        )
        .unwrap();
        let f = parse_rational(p, "t/(t-1)").unwrap();
        let a = ctx.expand(&f);
        assert_eq!((a.offset(), a.preperiod(), a.period()), (0, &[][..], &[1][..]));
        assert_eq!(ctx.to_rational(&a), f);
        assert_eq!(ctx.expand(&parse_rational(p, "t^2").unwrap()).offset(), -2);
    }
}
