//! Factorization of polynomials over `F_p`: square-free decomposition, distinct-degree
//! splitting and Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Poly;

/// `lc * Π factor^multiplicity` with monic irreducible factors sorted by [`Poly`]'s order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u32,
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    pub fn expand(&self, p: u32) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(p, self.unit), |acc, (f, m)| &acc * &f.pow(*m))
    }
}

/// Factors a nonzero polynomial. Panics on zero.
pub fn factor(f: &Poly) -> Factorization {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let p = f.characteristic();
    let unit = f.lc();
    let mut factors = Vec::new();
    // Deterministic splitting randomness: the output is sorted, so only speed depends on it.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    for (sqf, mult) in square_free(&f.monic()) {
        for (g, deg) in distinct_degree(&sqf) {
            for h in equal_degree(&g, deg, &mut rng) {
                factors.push((h, mult));
            }
        }
    }
    factors.sort();
    // merge equal factors coming from different square-free layers (cannot happen, but cheap)
    let mut merged: Vec<(Poly, usize)> = Vec::with_capacity(factors.len());
    for (g, m) in factors {
        match merged.last_mut() {
            Some((h, k)) if *h == g => *k += m,
            _ => merged.push((g, m)),
        }
    }
    debug_assert_eq!(Factorization { unit, factors: merged.clone() }.expand(p), *f);
    Factorization { unit, factors: merged }
}

pub fn is_irreducible(f: &Poly) -> bool {
    if f.degree().is_none_or(|d| d == 0) {
        return false;
    }
    let fac = factor(f);
    fac.factors.len() == 1 && fac.factors[0].1 == 1
}

/// p-th root of a polynomial in `t^p` (Frobenius is the identity on `F_p`).
fn pth_root(f: &Poly) -> Poly {
    let p = f.characteristic() as usize;
    let coeffs = f.coeffs().iter().step_by(p).copied().collect();
    Poly::from_residues(f.characteristic(), coeffs)
}

/// Square-free decomposition of a monic polynomial: pairs `(g, m)` with `g` square-free.
fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.characteristic() as usize;
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let df = f.derivative();
    if df.is_zero() {
        for (g, m) in square_free(&pth_root(f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if !c.is_one() {
        for (g, m) in square_free(&pth_root(&c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a square-free monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.characteristic();
    let x = Poly::t(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut i = 0;
    while rest.degree().unwrap_or(0) >= 2 * (i + 1) {
        i += 1;
        h = h.pow_mod(p as u64, &rest);
        let g = (&h - &x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    out
}

/// Cantor–Zassenhaus: splits `f`, a product of distinct irreducibles of degree `deg`.
fn equal_degree(f: &Poly, deg: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().unwrap_or(0);
    if n == deg {
        return vec![f.clone()];
    }
    let p = f.characteristic();
    loop {
        let coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let a = Poly::from_residues(p, coeffs);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // trace a + a^2 + ... + a^(2^(deg-1)) lands in F_2 on each factor
            let mut term = a.rem(f);
            let mut tr = term.clone();
            for _ in 1..deg {
                term = (&term * &term).rem(f);
                tr = &tr + &term;
            }
            tr
        } else {
            // a^((p^deg - 1)/2) = (a^(1 + p + .. + p^(deg-1)))^((p-1)/2)
            let mut frob = a.rem(f);
            let mut norm = frob.clone();
            for _ in 1..deg {
                frob = frob.pow_mod(p as u64, f);
                norm = (&norm * &frob).rem(f);
            }
            &norm.pow_mod((p as u64 - 1) / 2, f) - &Poly::one(p)
        };
        let g = b.gcd(f);
        if !g.is_one() && g.degree() != f.degree() {
            let mut out = equal_degree(&g, deg, rng);
            out.extend(equal_degree(&f.div_exact(&g), deg, rng));
            return out;
        }
    }
}
