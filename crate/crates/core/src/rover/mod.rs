//! Röver–Nekrashevych groups `V_d(G)`.
//!
//! An element `[T₋, σ(g₁, …, g_n), T₊]` sends `v_i w` to `u_{σ(i)} g_i(w)`, where `v_i` are
//! the leaves of the domain tree `T₊`, `u_j` the leaves of the range tree `T₋`, and the
//! states `g_i` live in a fixed self-similar automaton. Triples are not canonical; two
//! triples are equal when they agree after expanding both to a common domain tree.

mod tree;

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use crate::agl::{self, Agl1Element};
use crate::mealy::{Automaton, BoundaryPoint, StateId, Word};
use crate::perm::Perm;
use crate::series::CompletionContext;
use crate::{Error, Result};

pub use tree::CompleteTree;

/// A tree-pair triple. States are ids in the automaton of the owning [`RoverGroup`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoverElement {
    range: CompleteTree,
    sigma: Perm,
    states: Vec<StateId>,
    domain: CompleteTree,
}

impl RoverElement {
    pub fn new(range: CompleteTree, sigma: Perm, states: Vec<StateId>, domain: CompleteTree) -> Result<Self> {
        let n = domain.len();
        if range.len() != n || sigma.len() != n || states.len() != n {
            return Err(Error::InvalidInput(format!(
                "tree pair sizes disagree: range {}, sigma {}, states {}, domain {n}",
                range.len(),
                sigma.len(),
                states.len()
            )));
        }
        if range.d() != domain.d() {
            return Err(Error::AlphabetMismatch { left: range.d(), right: domain.d() });
        }
        Ok(RoverElement { range, sigma, states, domain })
    }

    /// A Higman–Thompson element: all states trivial.
    pub fn pure(range: CompleteTree, sigma: Perm, domain: CompleteTree) -> Result<Self> {
        let n = domain.len();
        Self::new(range, sigma, vec![0; n], domain)
    }

    /// The element exchanging the cones `C(u)` and `C(v)` by `uw ↔ vw`.
    pub fn cone_swap(d: usize, u: &[usize], v: &[usize]) -> Result<Self> {
        if u.starts_with(v) || v.starts_with(u) {
            return Err(Error::InvalidInput("cones must be disjoint".into()));
        }
        let tree = CompleteTree::with_leaf(d, u).union(&CompleteTree::with_leaf(d, v));
        let (i, j) = (tree.position(u).expect("u is a leaf"), tree.position(v).expect("v is a leaf"));
        let sigma = Perm::transposition(tree.len(), i, j);
        Self::pure(tree.clone(), sigma, tree)
    }

    pub fn d(&self) -> usize {
        self.domain.d()
    }

    pub fn range_tree(&self) -> &CompleteTree {
        &self.range
    }

    pub fn domain_tree(&self) -> &CompleteTree {
        &self.domain
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.states.iter().all(|&g| g == 0)
    }
}

/// The group `V_d(G)` for a self-similar automaton group `G` given by generators.
#[derive(Debug, Clone)]
pub struct RoverGroup {
    aut: Automaton,
    gens: Vec<StateId>,
    closure: Vec<StateId>,
    in_closure: HashSet<StateId>,
    persistent: bool,
    context: Option<CompletionContext>,
    decoded: HashMap<StateId, Agl1Element>,
}

impl RoverGroup {
    /// `S_G` is the state closure of `gens` and their inverses.
    pub fn new(mut aut: Automaton, gens: Vec<StateId>, max_states: usize) -> Result<Self> {
        let closure = aut.state_closure(&gens, max_states)?;
        let last = aut.d() - 1;
        let persistent = closure.iter().all(|&g| aut.is_i_persistent(g, last));
        let in_closure = closure.iter().copied().collect();
        Ok(RoverGroup {
            aut,
            gens,
            closure,
            in_closure,
            persistent,
            context: None,
            decoded: HashMap::new(),
        })
    }

    /// Attaches the completion context whose affine action the states realize, enabling
    /// [`RoverGroup::abelianization_image`].
    pub fn with_context(mut self, ctx: CompletionContext) -> Self {
        self.context = Some(ctx);
        self
    }

    pub fn d(&self) -> usize {
        self.aut.d()
    }

    pub fn automaton(&self) -> &Automaton {
        &self.aut
    }

    pub fn automaton_mut(&mut self) -> &mut Automaton {
        &mut self.aut
    }

    pub fn group_generators(&self) -> &[StateId] {
        &self.gens
    }

    /// The finite, symmetric, self-similar set `S_G`.
    pub fn closure(&self) -> &[StateId] {
        &self.closure
    }

    /// Whether every element of `S_G` is `d`-persistent.
    pub fn is_persistent(&self) -> bool {
        self.persistent
    }

    /// `h ∈ S_G ∪ {id}`.
    pub fn in_step_set(&self, h: StateId) -> bool {
        self.aut.is_identity(h) || self.in_closure.contains(&h)
    }

    pub fn identity(&self) -> RoverElement {
        let root = CompleteTree::root(self.d());
        RoverElement { range: root.clone(), sigma: Perm::identity(1), states: vec![0], domain: root }
    }

    /// Checks that the element belongs to this group's alphabet and automaton.
    pub fn check(&self, f: &RoverElement) -> Result<()> {
        if f.d() != self.d() {
            return Err(Error::AlphabetMismatch { left: self.d(), right: f.d() });
        }
        if let Some(&bad) = f.states.iter().find(|&&g| g >= self.aut.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.aut.len() });
        }
        Ok(())
    }

    /// Adds a caret below domain leaf `k` and below its image range leaf `σ(k)`.
    pub fn expand_leaf(&self, f: &RoverElement, k: usize) -> Result<RoverElement> {
        let n = f.len();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        let d = self.d();
        let g = f.states[k];
        let rho = self.aut.perm(g);
        let sk = f.sigma.apply(k);
        let shift = |s: usize| if s > sk { s + d - 1 } else { s };
        let mut images = Vec::with_capacity(n + d - 1);
        let mut states = Vec::with_capacity(n + d - 1);
        for j in 0..k {
            images.push(shift(f.sigma.apply(j)));
            states.push(f.states[j]);
        }
        for x in 0..d {
            images.push(sk + rho.apply(x));
            states.push(self.aut.child(g, x));
        }
        for j in k + 1..n {
            images.push(shift(f.sigma.apply(j)));
            states.push(f.states[j]);
        }
        Ok(RoverElement {
            range: f.range.expand(sk),
            sigma: Perm::from_images(images).expect("expansion keeps a bijection"),
            states,
            domain: f.domain.expand(k),
        })
    }

    /// Expands until the domain tree is `target`.
    pub fn expand_to(&self, f: &RoverElement, target: &CompleteTree) -> Result<RoverElement> {
        if !target.contains(&f.domain) {
            return Err(Error::NotARefinement);
        }
        let mut g = f.clone();
        while let Some(k) = (0..g.len()).find(|&k| target.position(g.domain.leaf(k)).is_none()) {
            g = self.expand_leaf(&g, k)?;
        }
        Ok(g)
    }

    /// Expands until the range tree is `target`, by expanding the domain leaf above each
    /// range leaf that still needs a caret.
    pub fn expand_range_to(&self, f: &RoverElement, target: &CompleteTree) -> Result<RoverElement> {
        if !target.contains(&f.range) {
            return Err(Error::NotARefinement);
        }
        let mut g = f.clone();
        while let Some(j) = (0..g.len()).find(|&j| target.position(g.range.leaf(j)).is_none()) {
            let k = g.sigma.inverse().apply(j);
            g = self.expand_leaf(&g, k)?;
        }
        Ok(g)
    }

    /// Equality via a common expansion.
    pub fn equals(&self, f: &RoverElement, g: &RoverElement) -> bool {
        if f.d() != g.d() {
            return false;
        }
        let common = f.domain.union(&g.domain);
        let (f, g) = match (self.expand_to(f, &common), self.expand_to(g, &common)) {
            (Ok(f), Ok(g)) => (f, g),
            _ => return false,
        };
        f.range == g.range
            && f.sigma == g.sigma
            && f.states.iter().zip(&g.states).all(|(&x, &y)| self.aut.equals(x, y))
    }

    /// `f ∘ g`: apply `g` first.
    pub fn multiply(&mut self, f: &RoverElement, g: &RoverElement) -> Result<RoverElement> {
        if f.d() != g.d() {
            return Err(Error::AlphabetMismatch { left: f.d(), right: g.d() });
        }
        let middle = f.domain.union(&g.range);
        let f = self.expand_to(f, &middle)?;
        let g = self.expand_range_to(g, &middle)?;
        let states = (0..g.len())
            .map(|i| self.aut.product(f.states[g.sigma.apply(i)], g.states[i]))
            .collect();
        Ok(RoverElement { range: f.range, sigma: f.sigma.compose(&g.sigma), states, domain: g.domain })
    }

    /// `[T₊, σ⁻¹(f_{σ⁻¹(1)}⁻¹, …), T₋]`.
    pub fn invert(&mut self, f: &RoverElement) -> RoverElement {
        let inv = f.sigma.inverse();
        let states = (0..f.len()).map(|j| self.aut.inverse(f.states[inv.apply(j)])).collect();
        RoverElement { range: f.domain.clone(), sigma: inv, states, domain: f.range.clone() }
    }

    /// Image of a finite word that passes through a domain leaf.
    pub fn act_long_word(&self, f: &RoverElement, w: &[usize]) -> Result<Word> {
        let k = f.domain.locate(w).ok_or(Error::WordTooShort { len: w.len() })?;
        let v = f.domain.leaf(k);
        let mut out = f.range.leaf(f.sigma.apply(k)).to_vec();
        out.extend(self.aut.act(f.states[k], &w[v.len()..]));
        Ok(out)
    }

    pub fn act_boundary(&self, f: &RoverElement, x: &BoundaryPoint) -> BoundaryPoint {
        let k = f.domain.locate(&x.prefix(f.domain.depth())).expect("every point has a domain leaf");
        let v = f.domain.leaf(k);
        let tail = self.aut.act_boundary(f.states[k], &x.suffix(v.len()));
        tail.prepend(f.range.leaf(f.sigma.apply(k)))
    }

    /// `ι_u(g)`: `g` on the cone `C(u)`, the identity elsewhere.
    pub fn iota(&self, u: &[usize], g: StateId) -> RoverElement {
        let tree = CompleteTree::with_leaf(self.d(), u);
        let mut states = vec![0; tree.len()];
        states[tree.position(u).expect("u is a leaf")] = g;
        RoverElement { range: tree.clone(), sigma: Perm::identity(tree.len()), states, domain: tree }
    }

    /// The quasi-retraction `r`: the state at the last domain leaf.
    pub fn quasi_retract(&self, f: &RoverElement) -> Result<StateId> {
        if !self.persistent {
            return Err(Error::NotPersistent { letter: self.d() });
        }
        Ok(*f.states.last().expect("a triple has at least one leaf"))
    }

    /// The factor `h = r(s·x) r(x)⁻¹`; for generators `s` it lies in `S_G ∪ {id}`.
    pub fn lipschitz_probe(&mut self, x: &RoverElement, s: &RoverElement) -> Result<StateId> {
        let sx = self.multiply(s, x)?;
        let (a, b) = (self.quasi_retract(&sx)?, self.quasi_retract(x)?);
        let b_inv = self.aut.inverse(b);
        Ok(self.aut.product(a, b_inv))
    }

    /// `ι₁(g)` and `ι₁(g⁻¹)` for every generator of `G`, then [`higman_thompson_generators`].
    pub fn generators(&mut self) -> Vec<RoverElement> {
        let mut out: Vec<RoverElement> = Vec::new();
        for g in self.gens.clone() {
            for h in [g, self.aut.inverse(g)] {
                let e = self.iota(&[0], h);
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out.extend(higman_thompson_generators(self.d()));
        out
    }

    /// `ι₁(S_G)` together with [`higman_thompson_generators`]: the generating set on which
    /// `r` is `(1,0)`-Lipschitz.
    pub fn step_generators(&self) -> Vec<RoverElement> {
        let mut out: Vec<RoverElement> =
            self.closure.iter().filter(|&&g| g != 0).map(|&g| self.iota(&[0], g)).collect();
        out.extend(higman_thompson_generators(self.d()));
        out
    }

    /// A random triple with up to `max_carets` carets per tree and states from `S_G`.
    pub fn random_element<R: Rng>(&self, rng: &mut R, max_carets: usize) -> RoverElement {
        let d = self.d();
        let carets = rng.gen_range(0..=max_carets);
        let grow = |rng: &mut R| {
            let mut t = CompleteTree::root(d);
            for _ in 0..carets {
                let k = rng.gen_range(0..t.len());
                t = t.expand(k);
            }
            t
        };
        let domain = grow(rng);
        let range = grow(rng);
        let mut images: Vec<usize> = (0..domain.len()).collect();
        images.shuffle(rng);
        let states = (0..domain.len()).map(|_| *self.closure.choose(rng).expect("closure contains e")).collect();
        RoverElement { range, sigma: Perm::from_images(images).expect("shuffle"), states, domain }
    }

    /// A random word of length `len` in [`RoverGroup::step_generators`], multiplied out.
    pub fn random_word<R: Rng>(&mut self, rng: &mut R, len: usize) -> Result<RoverElement> {
        let gens = self.step_generators();
        let mut f = self.identity();
        for _ in 0..len {
            let s = gens.choose(rng).expect("generating set is non-empty");
            f = self.multiply(s, &f)?;
        }
        Ok(f)
    }

    /// The image in `Z/4 ⊕ Z/2 ⊕ Z/2` of the `F_2` example: the characters applied to the
    /// product of the decoded affine states.
    pub fn abelianization_image(&mut self, f: &RoverElement) -> Result<(u8, u8, u8)> {
        let ctx = self
            .context
            .clone()
            .ok_or_else(|| Error::WrongContext("group has no affine context".into()))?;
        let mut total = Agl1Element::identity(ctx.p());
        for &g in &f.states {
            if !self.decoded.contains_key(&g) {
                let pair = agl::decode(&ctx, &self.aut, g)?;
                self.decoded.insert(g, pair);
            }
            total = total.mul(&self.decoded[&g]);
        }
        agl::characters(&ctx, &total)
    }

    /// Contracts carets whose merged recursion is already a state of the automaton.
    /// The result is equal to `f` but depends on the representative.
    pub fn reduce(&self, f: &RoverElement) -> RoverElement {
        let d = self.d();
        let mut f = f.clone();
        'outer: loop {
            for k in 0..f.len() {
                if k + d > f.len() {
                    break;
                }
                let Some(parent) = sibling_block(&f.domain, k, d) else { continue };
                let base = (k..k + d).map(|i| f.sigma.apply(i)).min().expect("d ≥ 2");
                let Some(range_parent) = sibling_block(&f.range, base, d) else { continue };
                let rho: Vec<usize> = (0..d).map(|x| f.sigma.apply(k + x).wrapping_sub(base)).collect();
                let Ok(rho) = Perm::from_images(rho) else { continue };
                let Some(h) = self.aut.find_row(&rho, &f.states[k..k + d]) else { continue };
                let n = f.len();
                let mut images = Vec::with_capacity(n - d + 1);
                let mut states = Vec::with_capacity(n - d + 1);
                let squeeze = |s: usize| if s > base { s - (d - 1) } else { s };
                for j in (0..n).filter(|j| !(k..k + d).contains(j)) {
                    if j == k + d {
                        images.push(base);
                        states.push(h);
                    }
                    images.push(squeeze(f.sigma.apply(j)));
                    states.push(f.states[j]);
                }
                if k + d == n {
                    images.push(base);
                    states.push(h);
                }
                let contract = |t: &CompleteTree, at: usize, v: Word| {
                    let mut leaves = t.leaves()[..at].to_vec();
                    leaves.push(v);
                    leaves.extend_from_slice(&t.leaves()[at + d..]);
                    CompleteTree::new(d, leaves).expect("contracting a caret keeps completeness")
                };
                f = RoverElement {
                    range: contract(&f.range, base, range_parent),
                    sigma: Perm::from_images(images).expect("contraction keeps a bijection"),
                    states,
                    domain: contract(&f.domain, k, parent),
                };
                continue 'outer;
            }
            return f;
        }
    }

    /// `[T- ; sigma ; g1,...,gn ; T+]`.
    pub fn format(&self, f: &RoverElement) -> String {
        let mut out = String::new();
        let names: Vec<String> = f.states.iter().map(|&g| self.aut.name(g)).collect();
        write!(
            out,
            "[{} ; {} ; {} ; {}]",
            f.range,
            f.sigma.one_line_string(),
            names.join(","),
            f.domain
        )
        .expect("writing to a string");
        out
    }

    pub fn parse(&self, text: &str) -> Result<RoverElement> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[T- ; sigma ; states ; T+]`, got `{text}`")))?;
        let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
        let [range, sigma, states, domain] = parts[..] else {
            return Err(Error::Parse(format!("expected four `;`-separated fields in `{text}`")));
        };
        let d = self.d();
        let states = states
            .split(',')
            .map(|s| {
                let s = s.trim();
                let s = if s == "id" { "e" } else { s };
                self.aut.resolve(s).ok_or_else(|| Error::Parse(format!("unknown state `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        RoverElement::new(
            CompleteTree::parse(d, range)?,
            Perm::from_one_line(sigma)?,
            states,
            CompleteTree::parse(d, domain)?,
        )
        .map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self, f: &RoverElement) -> serde_json::Value {
        let leaves = |t: &CompleteTree| -> Vec<String> {
            t.leaves().iter().map(|l| l.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")).collect()
        };
        json!({
            "range_tree": leaves(&f.range),
            "sigma": f.sigma.images().iter().map(|x| x + 1).collect::<Vec<_>>(),
            "states": f.states.iter().map(|&g| self.aut.name(g)).collect::<Vec<_>>(),
            "domain_tree": leaves(&f.domain),
        })
    }
}

/// If leaves `k..k+d` of `t` are the children of one vertex, that vertex.
fn sibling_block(t: &CompleteTree, k: usize, d: usize) -> Option<Word> {
    let first = t.leaf(k);
    let parent = first.split_last()?.1;
    (0..d)
        .all(|x| {
            let l = t.leaf(k + x);
            l.len() == first.len() && l.starts_with(parent) && l[parent.len()] == x
        })
        .then(|| parent.to_vec())
}

/// A finite symmetric set of pure elements generating `V_d`: with `C` one caret and `A`, `A'`
/// the two-caret trees with the second caret on the first and last leaf,
/// `[C, (1 2), C]`, `[C, (1 … d), C]`, `[A, (1 2), A]`, `[A, (1 … 2d-1), A]`, `[A', id, A]`
/// and their inverses.
pub fn higman_thompson_generators(d: usize) -> Vec<RoverElement> {
    let c = CompleteTree::caret(d);
    let a = c.expand(0);
    let a_last = c.expand(d - 1);
    let n = a.len();
    let mut out: Vec<RoverElement> = Vec::new();
    let mut push = |range: &CompleteTree, sigma: Perm, domain: &CompleteTree| {
        let inverse = sigma.inverse();
        for (r, s, dm) in [(range, sigma, domain), (domain, inverse, range)] {
            let e = RoverElement::pure(r.clone(), s, dm.clone()).expect("sizes match");
            if !out.contains(&e) {
                out.push(e);
            }
        }
    };
    push(&c, Perm::transposition(d, 0, 1), &c);
    push(&c, Perm::rotation(d), &c);
    push(&a, Perm::transposition(n, 0, 1), &a);
    push(&a, Perm::rotation(n), &a);
    push(&a_last, Perm::identity(n), &a);
    out
}
