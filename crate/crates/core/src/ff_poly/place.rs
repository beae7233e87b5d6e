use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{factor, is_irreducible, FieldElement, Poly, RationalFunction};
use crate::{Error, Result};

/// A place of `F_p(t)`: the point at infinity or a monic irreducible polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Infinity,
    Finite(Poly),
}

impl Place {
    /// The finite place of a monic irreducible polynomial.
    pub fn finite(poly: Poly) -> Result<Self> {
        if !poly.is_monic() || !is_irreducible(&poly) {
            return Err(Error::InvalidInput(format!("{poly} is not monic irreducible")));
        }
        Ok(Place::Finite(poly))
    }

    /// The degree-one place `t - c`.
    pub fn at(p: u32, c: u32) -> Self {
        Place::Finite(Poly::linear(p, c))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Infinity => 1,
            Place::Finite(f) => f.degree().unwrap_or(0),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// Parses `inf` or a polynomial, rescaling to monic form.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        let text = text.trim();
        if matches!(text, "inf" | "infinity" | "∞") {
            return Ok(Place::Infinity);
        }
        let f = super::parse_rational(p, text)?;
        if !f.is_polynomial() {
            return Err(Error::Parse(format!("place `{text}` is not a polynomial")));
        }
        Place::finite(f.numerator().monic())
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(poly) => write!(f, "{poly}"),
        }
    }
}

/// A finite, non-empty set of places.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaceSet {
    places: Vec<Place>,
}

impl PlaceSet {
    pub fn new(places: impl IntoIterator<Item = Place>) -> Result<Self> {
        let mut places: Vec<Place> = places.into_iter().collect();
        places.sort();
        places.dedup();
        if places.is_empty() {
            return Err(Error::InvalidInput("place set must be non-empty".into()));
        }
        Ok(PlaceSet { places })
    }

    pub fn contains(&self, place: &Place) -> bool {
        self.places.binary_search(place).is_ok()
    }

    pub fn contains_infinity(&self) -> bool {
        self.contains(&Place::Infinity)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Place> {
        self.places.iter()
    }

    pub fn finite_polys(&self) -> impl Iterator<Item = &Poly> {
        self.places.iter().filter_map(|pl| match pl {
            Place::Finite(f) => Some(f),
            Place::Infinity => None,
        })
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.places.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Valuation of `f` at `place`; `None` stands for `+∞` and occurs exactly when `f = 0`.
pub fn valuation(f: &RationalFunction, place: &Place) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    Some(match place {
        Place::Infinity => f.denominator().degree_i64() - f.numerator().degree_i64(),
        Place::Finite(g) => {
            f.numerator().split_off(g).0 as i64 - f.denominator().split_off(g).0 as i64
        }
    })
}

/// Whether `f` has no poles outside `s`.
pub fn is_s_integer(f: &RationalFunction, s: &PlaceSet) -> bool {
    if f.is_zero() {
        return true;
    }
    if !s.contains_infinity() && valuation(f, &Place::Infinity).unwrap() < 0 {
        return false;
    }
    factor(f.denominator())
        .factors
        .iter()
        .all(|(g, _)| s.contains(&Place::Finite(g.clone())))
}

/// `f = constant · Π v^exponent(v)` over the finite places of `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFactorization {
    pub constant: FieldElement,
    pub exponents: BTreeMap<Place, i64>,
}

impl UnitFactorization {
    pub fn exponent(&self, place: &Place) -> i64 {
        self.exponents.get(place).copied().unwrap_or(0)
    }

    /// Rebuilds the rational function.
    pub fn evaluate(&self) -> RationalFunction {
        let p = self.constant.modulus();
        self.exponents.iter().fold(
            RationalFunction::constant(p, self.constant.residue() as i64),
            |acc, (place, &e)| match place {
                Place::Finite(g) => {
                    &acc * &RationalFunction::from_poly(g.clone()).pow(e).expect("nonzero base")
                }
                Place::Infinity => acc,
            },
        )
    }
}

/// Writes a unit of `O_S` as a constant times powers of the finite places of `S`.
pub fn unit_factorization(f: &RationalFunction, s: &PlaceSet) -> Result<UnitFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = f.characteristic();
    if !s.contains_infinity() && valuation(f, &Place::Infinity) != Some(0) {
        return Err(Error::NotAUnit(f.to_string()));
    }
    let mut exponents: BTreeMap<Place, i64> =
        s.finite_polys().map(|g| (Place::Finite(g.clone()), 0)).collect();
    let num = factor(f.numerator());
    let den = factor(f.denominator());
    let parts = num.factors.iter().map(|(g, m)| (g, *m as i64));
    let parts = parts.chain(den.factors.iter().map(|(g, m)| (g, -(*m as i64))));
    for (g, m) in parts {
        let place = Place::Finite(g.clone());
        match exponents.get_mut(&place) {
            Some(e) => *e += m,
            None => return Err(Error::NotAUnit(f.to_string())),
        }
    }
    Ok(UnitFactorization { constant: FieldElement::new(num.unit as i64, p), exponents })
}
