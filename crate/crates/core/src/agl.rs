//! The affine groups `AGL_1(O_S)`: pairs `(α, β)` acting on `O = F_p[[π]]` by `γ ↦ αγ + β`,
//! hence on the rooted `p`-ary tree whose vertices are the classes `γ mod π^e`.
//!
//! Residue `r ∈ F_p` is letter `r` (0-based), so the first child of a vertex is the residue 0.
//! With this order the compiled recursions of the `F_2` example come out as
//! `a = (1 2)(e, e)`, `b = (b, ab)`, `c = (c, bab^-1c)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ff_poly::{
    is_s_integer, parse_rational, unit_factorization, Place, PlaceSet, RationalFunction,
};
use crate::mealy::{Automaton, BoundaryPoint, StateId};
use crate::perm::Perm;
use crate::series::{CompletionContext, EpSeries};
use crate::{Error, Result};

/// An element `(α, β)` with `α ∈ O_S^×` and `β ∈ O_S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Agl1Element {
    alpha: RationalFunction,
    beta: RationalFunction,
}

impl Agl1Element {
    /// Checks that `α` is a unit and `β` an integer of `O_S`.
    pub fn new(ctx: &CompletionContext, alpha: RationalFunction, beta: RationalFunction) -> Result<Self> {
        unit_factorization(&alpha, ctx.places())?;
        if !is_s_integer(&beta, ctx.places()) {
            return Err(Error::InvalidInput(format!("{beta} is not an S-integer")));
        }
        Ok(Agl1Element { alpha, beta })
    }

    /// Parses `(alpha; beta)`.
    pub fn parse(ctx: &CompletionContext, text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .and_then(|t| t.split_once(';'))
            .ok_or_else(|| Error::Parse(format!("expected `(alpha; beta)`, got `{text}`")))?;
        let alpha = parse_rational(ctx.p(), inner.0)?;
        let beta = parse_rational(ctx.p(), inner.1)?;
        Self::new(ctx, alpha, beta)
    }

    pub fn identity(p: u32) -> Self {
        Agl1Element { alpha: RationalFunction::one(p), beta: RationalFunction::zero(p) }
    }

    pub fn alpha(&self) -> &RationalFunction {
        &self.alpha
    }

    pub fn beta(&self) -> &RationalFunction {
        &self.beta
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_one() && self.beta.is_zero()
    }

    /// Composition `self ∘ other`: `(α, β)(α', β') = (αα', αβ' + β)`.
    pub fn mul(&self, other: &Agl1Element) -> Agl1Element {
        Agl1Element {
            alpha: &self.alpha * &other.alpha,
            beta: &(&self.alpha * &other.beta) + &self.beta,
        }
    }

    /// `(α⁻¹, -β/α)`.
    pub fn inverse(&self) -> Agl1Element {
        let inv = self.alpha.inverse().expect("α is a unit");
        Agl1Element { beta: -&(&self.beta * &inv), alpha: inv }
    }

    /// `αγ + β` computed on series.
    pub fn act_affine(&self, ctx: &CompletionContext, gamma: &EpSeries) -> EpSeries {
        ctx.expand(&self.alpha).mul(gamma).add(&ctx.expand(&self.beta))
    }

    /// `r ↦ α(s) r + β(s)` on the residue field.
    pub fn root_permutation(&self, ctx: &CompletionContext) -> Perm {
        let p = ctx.p() as u64;
        let (a0, b0) = (ctx.residue(&self.alpha) as u64, ctx.residue(&self.beta) as u64);
        Perm::from_images((0..p).map(|r| ((a0 * r + b0) % p) as usize).collect())
            .expect("α(s) is nonzero")
    }

    /// The state at the depth-one vertex `r`: `αγ + β` with `γ = r + πζ` equals
    /// `c + π(αζ + (αr + β - c)/π)` where `c` is the image residue.
    pub fn child(&self, ctx: &CompletionContext, r: u32) -> Agl1Element {
        let p = ctx.p();
        let c = self.root_permutation(ctx).apply(r as usize) as i64;
        let shifted = &(&(&self.alpha * &RationalFunction::constant(p, r as i64)) + &self.beta)
            - &RationalFunction::constant(p, c);
        let beta = shifted.checked_div(ctx.pi()).expect("π is nonzero");
        Agl1Element { alpha: self.alpha.clone(), beta }
    }

    /// The state at the vertex `γ mod π^e` whose digits are `vertex`, from the closed form
    /// `(α, π^{-e}[β]_e + π^{-e}(αγ - [αγ]^e))` with `γ = [γ]^e`.
    pub fn state_of(&self, ctx: &CompletionContext, vertex: &[u32]) -> Agl1Element {
        let e = vertex.len() as i64;
        let pi_e = ctx.pi().pow(e).expect("π is nonzero");
        let translation = &(&self.beta - &head(ctx, &self.beta, e)) / &pi_e;
        Agl1Element { alpha: self.alpha.clone(), beta: &translation + &self.delta(ctx, vertex) }
    }

    /// `δ = π^{-e}(αγ - [αγ]^e)` for the vertex `γ mod π^e`; always an element of `O`.
    pub fn delta(&self, ctx: &CompletionContext, vertex: &[u32]) -> RationalFunction {
        let e = vertex.len() as i64;
        let gamma = ctx.to_rational(&EpSeries::finite(ctx.p(), 0, vertex.to_vec()));
        let alpha_gamma = &self.alpha * &gamma;
        let pi_e = ctx.pi().pow(e).expect("π is nonzero");
        &(&alpha_gamma - &head(ctx, &alpha_gamma, e)) / &pi_e
    }

    /// Whether `α ∈ O_S^×` and `β ∈ O_S`.
    pub fn in_ring(&self, places: &PlaceSet) -> bool {
        unit_factorization(&self.alpha, places).is_ok() && is_s_integer(&self.beta, places)
    }
}

/// `[f]^e`: the digits of `f` below `π^e`, as a rational function.
fn head(ctx: &CompletionContext, f: &RationalFunction, e: i64) -> RationalFunction {
    ctx.to_rational(&ctx.expand(f).truncate(None, Some(e)))
}

impl fmt::Display for Agl1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.alpha, self.beta)
    }
}

/// A compiled generating set: the automaton on `p` letters and the pair behind each state.
#[derive(Debug, Clone)]
pub struct AglCompilation {
    pub automaton: Automaton,
    pub generators: Vec<StateId>,
    elements: HashMap<StateId, Agl1Element>,
}

impl AglCompilation {
    /// The pair represented by a compiled state.
    pub fn element(&self, g: StateId) -> Option<&Agl1Element> {
        self.elements.get(&g)
    }

    /// Compiled states in id order.
    pub fn states(&self) -> Vec<StateId> {
        let mut ids: Vec<StateId> = self.elements.keys().copied().collect();
        ids.sort_unstable();
        ids
    }
}

/// Longest word tried when naming compiled states.
const NAME_WORD_LEN: usize = 5;

/// Compiles the closure of `gens` (with inverses) under taking states. Generators are named by
/// `names`; other states by a shortest word in the generators, e.g. `bab^-1c`.
pub fn compile(
    ctx: &CompletionContext,
    gens: &[Agl1Element],
    names: &[&str],
    max_states: usize,
) -> Result<AglCompilation> {
    let p = ctx.p();
    let mut index: HashMap<Agl1Element, usize> = HashMap::new();
    let mut elements: Vec<Agl1Element> = Vec::new();
    let mut queue = VecDeque::new();
    let seeds = std::iter::once(Agl1Element::identity(p))
        .chain(gens.iter().cloned())
        .chain(gens.iter().map(Agl1Element::inverse));
    for g in seeds {
        if !index.contains_key(&g) {
            index.insert(g.clone(), elements.len());
            elements.push(g.clone());
            queue.push_back(g);
        }
    }
    let mut rows: Vec<(Perm, Vec<usize>)> = Vec::new();
    while let Some(g) = queue.pop_front() {
        let mut children = Vec::with_capacity(p as usize);
        for r in 0..p {
            let h = g.child(ctx, r);
            let next = elements.len();
            let i = *index.entry(h.clone()).or_insert(next);
            if i == next {
                if elements.len() >= max_states {
                    return Err(Error::BudgetExceeded { limit: max_states });
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
            children.push(i);
        }
        rows.push((g.root_permutation(ctx), children));
    }
    let (mut automaton, ids) = Automaton::from_rows(p as usize, &rows)?;
    let mut by_state = HashMap::new();
    for (el, &id) in elements.iter().zip(&ids) {
        by_state.insert(id, el.clone());
    }
    let generators: Vec<StateId> = gens.iter().map(|g| ids[index[g]]).collect();
    for (&id, &name) in generators.iter().zip(names) {
        automaton.set_name(id, name);
    }
    name_by_words(&mut automaton, gens, names, &generators, &by_state);
    Ok(AglCompilation { automaton, generators, elements: by_state })
}

/// Breadth-first search over words in the generators and their inverses.
fn name_by_words(
    aut: &mut Automaton,
    gens: &[Agl1Element],
    names: &[&str],
    ids: &[StateId],
    states: &HashMap<StateId, Agl1Element>,
) {
    if names.len() != gens.len() {
        return;
    }
    let sep = if names.iter().all(|n| n.chars().count() == 1) { "" } else { "*" };
    let mut letters: Vec<(String, Agl1Element)> = Vec::new();
    for (g, name) in gens.iter().zip(names) {
        letters.push((name.to_string(), g.clone()));
        let inv = g.inverse();
        if inv != *g {
            letters.push((format!("{name}^-1"), inv));
        }
    }
    let wanted: HashMap<&Agl1Element, StateId> = states
        .iter()
        .filter(|(id, _)| !aut.has_name(**id) && !ids.contains(id))
        .map(|(&id, el)| (el, id))
        .collect();
    let mut missing = wanted.len();
    let mut seen: HashMap<Agl1Element, ()> = HashMap::new();
    let mut layer = vec![(String::new(), Agl1Element::identity(gens.first().map_or(2, |g| g.alpha.characteristic())))];
    seen.insert(layer[0].1.clone(), ());
    for _ in 0..NAME_WORD_LEN {
        if missing == 0 {
            break;
        }
        let mut next = Vec::new();
        for (word, el) in &layer {
            for (name, letter) in &letters {
                let prod = el.mul(letter);
                if seen.insert(prod.clone(), ()).is_some() {
                    continue;
                }
                let word = if word.is_empty() { name.clone() } else { format!("{word}{sep}{name}") };
                if let Some(&id) = wanted.get(&prod) {
                    aut.set_name(id, &word);
                    missing -= 1;
                }
                next.push((word, prod));
            }
        }
        layer = next;
    }
}

/// Recovers `(α, β)` from any state acting affinely on the first `p` letters:
/// `β = g(0^ω)` and `α = g(1 0^ω) - β`.
pub fn decode(ctx: &CompletionContext, aut: &Automaton, g: StateId) -> Result<Agl1Element> {
    let p = ctx.p();
    if aut.d() < p as usize {
        return Err(Error::WrongContext(format!("automaton has {} letters, need {p}", aut.d())));
    }
    let as_series = |x: &BoundaryPoint| -> Result<EpSeries> {
        let digit = |&a: &usize| {
            u32::try_from(a).ok().filter(|&a| a < p).ok_or_else(|| {
                Error::WrongContext("state leaves the residue letters".into())
            })
        };
        let pre = x.preperiod().iter().map(digit).collect::<Result<Vec<_>>>()?;
        let per = x.period().iter().map(digit).collect::<Result<Vec<_>>>()?;
        EpSeries::new(p, 0, pre, per)
    };
    let zero = BoundaryPoint::new(vec![], vec![0]).expect("non-empty period");
    let one = BoundaryPoint::new(vec![1], vec![0]).expect("non-empty period");
    let beta = ctx.to_rational(&as_series(&aut.act_boundary(g, &zero))?);
    let image_one = ctx.to_rational(&as_series(&aut.act_boundary(g, &one))?);
    let alpha = &image_one - &beta;
    Agl1Element::new(ctx, alpha, beta)
}

/// The characters `χ`, `χ_b`, `χ_c` of the `F_2` example, with values in `Z/4 ⊕ Z/2 ⊕ Z/2`.
///
/// Writing `α = t^m (1+t+t²)^n`: `χ = m + n + 2β(1) mod 4`, `χ_b = m mod 2`, `χ_c = n mod 2`.
pub fn characters(ctx: &CompletionContext, g: &Agl1Element) -> Result<(u8, u8, u8)> {
    let expected = f2_example_places();
    let s = Place::parse(2, "1+t").expect("valid place");
    if ctx.p() != 2 || *ctx.places() != expected || *ctx.place() != s {
        return Err(Error::WrongContext(format!("characters need the F_2 example context, got {ctx}")));
    }
    let units = unit_factorization(&g.alpha, ctx.places())?;
    let m = units.exponent(&Place::parse(2, "t").expect("valid place"));
    let n = units.exponent(&Place::parse(2, "1+t+t^2").expect("valid place"));
    let beta_at_one = ctx.residue(&g.beta) as i64;
    let chi = (m + n + 2 * beta_at_one).rem_euclid(4) as u8;
    Ok((chi, m.rem_euclid(2) as u8, n.rem_euclid(2) as u8))
}

/// `S = {∞, t, 1+t+t²}` over `F_2`.
pub fn f2_example_places() -> PlaceSet {
    PlaceSet::new([
        Place::Infinity,
        Place::parse(2, "t").expect("valid place"),
        Place::parse(2, "1+t+t^2").expect("valid place"),
    ])
    .expect("non-empty")
}

/// `p = 2`, `s = [ν_{1+t}]`, `S = {∞, t, 1+t+t²}`, `π = 1+t`.
pub fn f2_example_context() -> CompletionContext {
    CompletionContext::new(
        2,
        Place::parse(2, "1+t").expect("valid place"),
        f2_example_places(),
        parse_rational(2, "1+t").expect("valid uniformizer"),
    )
    .expect("valid context")
}
