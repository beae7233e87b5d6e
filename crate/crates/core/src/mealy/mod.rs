//! Finite-state automorphisms of the rooted `d`-ary tree as Mealy automata.
//!
//! An [`Automaton`] is a table of states, each with a root permutation and `d` children
//! (the wreath recursion `g = ρ(g)(g_0, …, g_{d-1})`). Letters are `0..d` internally and
//! `1..=d` in every text form. State `0` is always the identity.
//!
//! The table is kept minimal: no two states define the same automorphism. New states arrive in
//! batches (from definitions, products, inverses, …) and are merged against the existing table by
//! signature lookup followed by an exact bisimulation check, so state identity *is* equality of
//! automorphisms. [`Automaton::equals`] still decides equality independently by exploring pairs.

mod boundary;
mod defs;

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use crate::perm::Perm;
use crate::{Error, Result};

pub use boundary::BoundaryPoint;
pub use defs::{format_word, parse_word};

pub type StateId = usize;
pub type Word = Vec<usize>;

/// Depth of the signature hashes used to find merge candidates.
const SIG_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
struct State {
    perm: Perm,
    children: Vec<StateId>,
}

/// A state reference inside a batch: an existing state or a batch entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Old(StateId),
    New(usize),
}

#[derive(Debug, Clone)]
struct Pending {
    perm: Perm,
    children: Vec<Node>,
}

#[derive(Debug, Clone)]
pub struct Automaton {
    d: usize,
    states: Vec<State>,
    sigs: Vec<[u64; SIG_DEPTH + 1]>,
    by_sig: HashMap<u64, Vec<StateId>>,
    names: Vec<Option<String>>,
    by_name: HashMap<String, StateId>,
    product_memo: HashMap<(StateId, StateId), StateId>,
    inverse_memo: HashMap<StateId, StateId>,
}

impl Automaton {
    /// The automaton on `d ≥ 2` letters containing only the identity, named `e`.
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "alphabet must have at least two letters");
        let mut aut = Automaton {
            d,
            states: Vec::new(),
            sigs: Vec::new(),
            by_sig: HashMap::new(),
            names: Vec::new(),
            by_name: HashMap::new(),
            product_memo: HashMap::new(),
            inverse_memo: HashMap::new(),
        };
        let sig = self_loop_signature(&Perm::identity(d));
        aut.push_state(State { perm: Perm::identity(d), children: vec![0; d] }, sig);
        aut.set_name(0, "e");
        aut
    }

    /// Adds states given as rows `(perm, children)` where children index into `rows`.
    ///
    /// Returns the state id of every row. Rows equal to existing states reuse them.
    pub fn add_rows(&mut self, rows: &[(Perm, Vec<usize>)]) -> Result<Vec<StateId>> {
        for (perm, children) in rows {
            if perm.len() != self.d || children.len() != self.d {
                return Err(Error::AlphabetMismatch { left: self.d, right: perm.len() });
            }
            if let Some(&bad) = children.iter().find(|&&c| c >= rows.len()) {
                return Err(Error::IndexOutOfRange { index: bad, len: rows.len() });
            }
        }
        let batch = rows
            .iter()
            .map(|(perm, children)| Pending {
                perm: perm.clone(),
                children: children.iter().map(|&c| Node::New(c)).collect(),
            })
            .collect();
        Ok(self.absorb(batch))
    }

    /// Builds an automaton from rows; see [`Automaton::add_rows`].
    pub fn from_rows(d: usize, rows: &[(Perm, Vec<usize>)]) -> Result<(Self, Vec<StateId>)> {
        let mut aut = Automaton::new(d);
        let ids = aut.add_rows(rows)?;
        Ok((aut, ids))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of states in the table (including the identity).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> StateId {
        0
    }

    pub fn perm(&self, g: StateId) -> &Perm {
        &self.states[g].perm
    }

    pub fn children(&self, g: StateId) -> &[StateId] {
        &self.states[g].children
    }

    pub fn child(&self, g: StateId, x: usize) -> StateId {
        self.states[g].children[x]
    }

    pub fn name(&self, g: StateId) -> String {
        self.names[g].clone().unwrap_or_else(|| format!("s{g}"))
    }

    pub fn has_name(&self, g: StateId) -> bool {
        self.names[g].is_some()
    }

    /// Assigns a display name. The first name given to a state is the one displayed; every
    /// name remains usable for lookup.
    pub fn set_name(&mut self, g: StateId, name: &str) {
        self.by_name.insert(name.to_string(), g);
        if self.names[g].is_none() {
            self.names[g] = Some(name.to_string());
        }
    }

    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    /// A state by name, or by its default name `s<id>`.
    pub fn resolve(&self, name: &str) -> Option<StateId> {
        self.lookup(name).or_else(|| {
            let id: StateId = name.strip_prefix('s')?.parse().ok()?;
            (id < self.len()).then_some(id)
        })
    }

    /// An existing state with exactly this wreath recursion.
    pub fn find_row(&self, perm: &Perm, children: &[StateId]) -> Option<StateId> {
        self.states.iter().position(|s| s.perm == *perm && s.children == children)
    }

    /// All names known to the automaton, sorted.
    pub fn named_states(&self) -> Vec<(String, StateId)> {
        let mut out: Vec<_> = self.by_name.iter().map(|(n, &g)| (n.clone(), g)).collect();
        out.sort();
        out
    }

    /// Image of `w` under `g`: `g(xw) = ρ(g)(x) · g_x(w)`.
    pub fn act(&self, g: StateId, w: &[usize]) -> Word {
        let mut state = g;
        w.iter()
            .map(|&x| {
                let s = &self.states[state];
                state = s.children[x];
                s.perm.apply(x)
            })
            .collect()
    }

    /// The state of `g` at the vertex `w`.
    pub fn state_at(&self, g: StateId, w: &[usize]) -> StateId {
        w.iter().fold(g, |s, &x| self.states[s].children[x])
    }

    /// States reachable from `roots` (including the roots), in breadth-first order.
    pub fn reachable(&self, roots: &[StateId]) -> Vec<StateId> {
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = roots.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            if seen.insert(s) {
                order.push(s);
                queue.extend(self.states[s].children.iter().copied());
            }
        }
        order
    }

    /// `g` is trivial iff every reachable state has trivial root permutation.
    pub fn is_identity(&self, g: StateId) -> bool {
        self.reachable(&[g]).iter().all(|&s| self.states[s].perm.is_identity())
    }

    /// Decides `f = g` by exploring the pairs of states reachable in lockstep.
    pub fn equals(&self, f: StateId, g: StateId) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![(f, g)];
        while let Some((x, y)) = stack.pop() {
            if !seen.insert((x, y)) {
                continue;
            }
            let (sx, sy) = (&self.states[x], &self.states[y]);
            if sx.perm != sy.perm {
                return false;
            }
            stack.extend(sx.children.iter().copied().zip(sy.children.iter().copied()));
        }
        true
    }

    /// `f ∘ g` (apply `g` first): `ρ(f)ρ(g)(f_{ρ(g)(0)} g_0, …)`.
    pub fn product(&mut self, f: StateId, g: StateId) -> StateId {
        if f == 0 {
            return g;
        }
        if g == 0 {
            return f;
        }
        if let Some(&h) = self.product_memo.get(&(f, g)) {
            return h;
        }
        let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
        let mut pairs: Vec<(StateId, StateId)> = Vec::new();
        let mut batch: Vec<Pending> = Vec::new();
        let node = |x: StateId,
                    y: StateId,
                    index: &mut HashMap<(StateId, StateId), usize>,
                    pairs: &mut Vec<(StateId, StateId)>,
                    memo: &HashMap<(StateId, StateId), StateId>| {
            if x == 0 {
                return Node::Old(y);
            }
            if y == 0 {
                return Node::Old(x);
            }
            if let Some(&h) = memo.get(&(x, y)) {
                return Node::Old(h);
            }
            let next = pairs.len();
            let i = *index.entry((x, y)).or_insert(next);
            if i == next {
                pairs.push((x, y));
            }
            Node::New(i)
        };
        node(f, g, &mut index, &mut pairs, &self.product_memo);
        while batch.len() < pairs.len() {
            let (x, y) = pairs[batch.len()];
            let (sx, sy) = (&self.states[x], &self.states[y]);
            let perm = sx.perm.compose(&sy.perm);
            let mut children = Vec::with_capacity(self.d);
            for c in 0..self.d {
                let fx = sx.children[sy.perm.apply(c)];
                children.push(node(fx, sy.children[c], &mut index, &mut pairs, &self.product_memo));
            }
            batch.push(Pending { perm, children });
        }
        let ids = self.absorb(batch);
        for (pair, id) in pairs.into_iter().zip(ids.iter().copied()) {
            self.product_memo.insert(pair, id);
        }
        ids[0]
    }

    /// `g⁻¹ = ρ(g)⁻¹((g_{ρ⁻¹(0)})⁻¹, …)`.
    pub fn inverse(&mut self, g: StateId) -> StateId {
        if let Some(&h) = self.inverse_memo.get(&g) {
            return h;
        }
        let states = self.reachable(&[g]);
        let pos: HashMap<StateId, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let batch = states
            .iter()
            .map(|&s| {
                let st = &self.states[s];
                let inv = st.perm.inverse();
                let children = (0..self.d).map(|x| Node::New(pos[&st.children[inv.apply(x)]])).collect();
                Pending { perm: inv, children }
            })
            .collect();
        let ids = self.absorb(batch);
        for (&s, &id) in states.iter().zip(&ids) {
            self.inverse_memo.insert(s, id);
            self.inverse_memo.insert(id, s);
        }
        ids[0]
    }

    /// Left-to-right product `w[0] ∘ w[1] ∘ …`; the identity for an empty list.
    pub fn product_all(&mut self, word: &[StateId]) -> StateId {
        word.iter().fold(0, |acc, &g| self.product(acc, g))
    }

    pub fn power(&mut self, g: StateId, k: usize) -> StateId {
        (0..k).fold(0, |acc, _| self.product(acc, g))
    }

    /// The states reachable from the generators and their inverses. Fails if there are more
    /// than `max_states` of them.
    pub fn state_closure(&mut self, gens: &[StateId], max_states: usize) -> Result<Vec<StateId>> {
        let mut roots = vec![0];
        for &g in gens {
            roots.push(g);
            let inv = self.inverse(g);
            roots.push(inv);
        }
        let closure = self.reachable(&roots);
        if closure.len() > max_states {
            return Err(Error::BudgetExceeded { limit: max_states });
        }
        Ok(closure)
    }

    /// Whether the `i`-th child of `g` is `g` itself.
    pub fn is_i_persistent(&self, g: StateId, i: usize) -> bool {
        i < self.d && self.equals(self.child(g, i), g)
    }

    /// Some letter `i` such that every given state is `i`-persistent.
    pub fn persistent_letter(&self, states: &[StateId]) -> Option<usize> {
        (0..self.d).find(|&i| states.iter().all(|&g| self.is_i_persistent(g, i)))
    }

    /// [`Automaton::persistent_letter`] over the whole table.
    pub fn is_persistent_group(&self) -> Option<usize> {
        let all: Vec<StateId> = (0..self.len()).collect();
        self.persistent_letter(&all)
    }

    /// The same states on `d + 1` letters: each perm fixes the new letter and each state
    /// becomes its own last child. State ids and names are preserved.
    pub fn persist_extend(&self) -> Automaton {
        let d = self.d + 1;
        let rows: Vec<(Perm, Vec<usize>)> = self
            .states
            .iter()
            .enumerate()
            .map(|(g, s)| {
                let mut children = s.children.clone();
                children.push(g);
                (s.perm.extend(d), children)
            })
            .collect();
        self.rebuild(d, &rows)
    }

    /// Conjugation of every state by the tree automorphism applying the transposition
    /// `(i j)` to every letter. State ids and names are preserved.
    pub fn conjugate_by_transposition(&self, i: usize, j: usize) -> Automaton {
        let tau = Perm::transposition(self.d, i, j);
        let rows: Vec<(Perm, Vec<usize>)> = self
            .states
            .iter()
            .map(|s| {
                let perm = tau.compose(&s.perm).compose(&tau);
                let children = (0..self.d).map(|x| s.children[tau.apply(x)]).collect();
                (perm, children)
            })
            .collect();
        self.rebuild(self.d, &rows)
    }

    /// Rows that are a faithful image of this (minimal) table, one row per state.
    fn rebuild(&self, d: usize, rows: &[(Perm, Vec<usize>)]) -> Automaton {
        let (mut aut, ids) = Automaton::from_rows(d, rows).expect("rows are well formed");
        debug_assert!(ids.iter().enumerate().all(|(i, &id)| i == id));
        for (name, &g) in &self.by_name {
            aut.set_name(ids[g], name);
        }
        for (g, name) in self.names.iter().enumerate() {
            if let Some(name) = name {
                aut.names[ids[g]] = Some(name.clone());
            }
        }
        aut
    }

    /// The least `k ≤ n` with `g^k = 1`.
    pub fn has_finite_order_upto(&mut self, g: StateId, n: usize) -> Option<usize> {
        let mut pow = g;
        for k in 1..=n {
            if self.is_identity(pow) {
                return Some(k);
            }
            pow = self.product(pow, g);
        }
        None
    }

    /// For every state `g` reachable from `roots` and every state `g'` of `g`,
    /// `(g')⁻¹ g` has order at most `n`.
    pub fn is_coarsely_diagonal_upto(&mut self, roots: &[StateId], n: usize) -> bool {
        for g in self.reachable(roots) {
            for h in self.reachable(&[g]) {
                let hinv = self.inverse(h);
                let x = self.product(hinv, g);
                if self.has_finite_order_upto(x, n).is_none() {
                    return false;
                }
            }
        }
        true
    }

    fn push_state(&mut self, state: State, sig: [u64; SIG_DEPTH + 1]) -> StateId {
        let id = self.states.len();
        self.states.push(state);
        self.sigs.push(sig);
        self.by_sig.entry(sig[SIG_DEPTH]).or_default().push(id);
        self.names.push(None);
        id
    }

    /// Merges a batch into the table, returning the id each batch entry ends up as.
    fn absorb(&mut self, batch: Vec<Pending>) -> Vec<StateId> {
        let n = batch.len();
        // signatures, level by level
        let mut sigs = vec![[0u64; SIG_DEPTH + 1]; n];
        for k in 0..=SIG_DEPTH {
            let prev: Vec<u64> = if k == 0 { Vec::new() } else { sigs.iter().map(|s| s[k - 1]).collect() };
            for (i, pending) in batch.iter().enumerate() {
                let mut h = DefaultHasher::new();
                pending.perm.hash(&mut h);
                if k > 0 {
                    for c in &pending.children {
                        match *c {
                            Node::Old(s) => self.sigs[s][k - 1],
                            Node::New(j) => prev[j],
                        }
                        .hash(&mut h);
                    }
                }
                sigs[i][k] = h.finish();
            }
        }
        let mut resolved: Vec<Option<StateId>> = vec![None; n];
        for i in 0..n {
            if let Some(cands) = self.by_sig.get(&sigs[i][SIG_DEPTH]) {
                resolved[i] = cands.iter().copied().find(|&c| self.bisimilar(&batch, Node::New(i), Node::Old(c)));
            }
        }
        let mut rep: Vec<usize> = (0..n).collect();
        let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
        for i in (0..n).filter(|&i| resolved[i].is_none()) {
            let group = groups.entry(sigs[i][SIG_DEPTH]).or_default();
            match group.iter().copied().find(|&r| self.bisimilar(&batch, Node::New(i), Node::New(r))) {
                Some(r) => rep[i] = r,
                None => group.push(i),
            }
        }
        let mut next = self.states.len();
        for i in 0..n {
            if resolved[i].is_none() && rep[i] == i {
                resolved[i] = Some(next);
                next += 1;
            }
        }
        for i in 0..n {
            if resolved[i].is_none() {
                resolved[i] = resolved[rep[i]];
            }
        }
        let ids: Vec<StateId> = resolved.into_iter().map(Option::unwrap).collect();
        for (i, pending) in batch.into_iter().enumerate() {
            if ids[i] == self.states.len() {
                let children = pending
                    .children
                    .iter()
                    .map(|c| match *c {
                        Node::Old(s) => s,
                        Node::New(j) => ids[j],
                    })
                    .collect();
                self.push_state(State { perm: pending.perm, children }, sigs[i]);
            }
        }
        ids
    }

    /// Bisimilarity of two nodes of the table extended by `batch`.
    fn bisimilar(&self, batch: &[Pending], a: Node, b: Node) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            if x == y || !seen.insert((x, y)) {
                continue;
            }
            if let (Node::Old(_), Node::Old(_)) = (x, y) {
                // distinct existing states are distinct automorphisms
                return false;
            }
            let (px, cx) = self.node_row(batch, x);
            let (py, cy) = self.node_row(batch, y);
            if px != py {
                return false;
            }
            stack.extend(cx.into_iter().zip(cy));
        }
        true
    }

    fn node_row(&self, batch: &[Pending], n: Node) -> (Perm, Vec<Node>) {
        match n {
            Node::Old(s) => {
                let st = &self.states[s];
                (st.perm.clone(), st.children.iter().map(|&c| Node::Old(c)).collect())
            }
            Node::New(i) => (batch[i].perm.clone(), batch[i].children.clone()),
        }
    }
}

/// Signatures of a state all of whose children are itself.
fn self_loop_signature(perm: &Perm) -> [u64; SIG_DEPTH + 1] {
    let d = perm.len();
    let mut sig = [0u64; SIG_DEPTH + 1];
    let mut h = DefaultHasher::new();
    perm.hash(&mut h);
    sig[0] = h.finish();
    for k in 1..=SIG_DEPTH {
        let mut h = DefaultHasher::new();
        perm.hash(&mut h);
        for _ in 0..d {
            sig[k - 1].hash(&mut h);
        }
        sig[k] = h.finish();
    }
    sig
}
