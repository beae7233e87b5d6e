//! The flag complexes `X_k` for a finite self-similar group `G` acting on the `d`-ary tree.
//!
//! A vertex is the class of a morphism that splits one of `k - d + 1` strands into `d` and
//! lands in `k` strands. Up to the invertible morphisms at the source, it is determined by
//! the ordered tuple of target strands the `d` new strands go to (the support tuple) and
//! their `G`-labels (the decoration), modulo `G` acting on the split strand:
//! `h` sends `(s, g)` to `(s ∘ ρ(h), g_{ρ(h)(x)} h_x)`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::mealy::{Automaton, StateId};
use crate::perm::Perm;
use crate::{Error, Result};

/// A finite group of tree automorphisms, stored as indexed tables. Index 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    d: usize,
    names: Vec<String>,
    perms: Vec<Perm>,
    children: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn trivial(d: usize) -> Self {
        FiniteGroup {
            d,
            names: vec!["e".into()],
            perms: vec![Perm::identity(d)],
            children: vec![vec![0; d]],
            mul: vec![vec![0]],
        }
    }

    /// The group generated by `gens`, which must be finite and closed under taking states.
    pub fn generate(aut: &mut Automaton, gens: &[StateId], max_order: usize) -> Result<Self> {
        let mut elements = vec![aut.identity()];
        let mut index: HashMap<StateId, usize> = HashMap::from([(aut.identity(), 0)]);
        let mut queue = VecDeque::from([aut.identity()]);
        while let Some(g) = queue.pop_front() {
            for &s in gens.iter().chain(aut.children(g).to_vec().iter()) {
                for h in [aut.product(g, s), s] {
                    if let std::collections::hash_map::Entry::Vacant(e) = index.entry(h) {
                        if elements.len() >= max_order {
                            return Err(Error::BudgetExceeded { limit: max_order });
                        }
                        e.insert(elements.len());
                        elements.push(h);
                        queue.push_back(h);
                    }
                }
            }
        }
        let n = elements.len();
        let mut mul = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let h = aut.product(elements[i], elements[j]);
                mul[i][j] = *index.get(&h).ok_or_else(|| {
                    Error::InvalidInput("generated set is not closed under products".into())
                })?;
            }
        }
        let children = elements
            .iter()
            .map(|&g| aut.children(g).iter().map(|c| index[c]).collect())
            .collect();
        Ok(FiniteGroup {
            d: aut.d(),
            names: elements.iter().map(|&g| aut.name(g)).collect(),
            perms: elements.iter().map(|&g| aut.perm(g).clone()).collect(),
            children,
            mul,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn perm(&self, g: usize) -> &Perm {
        &self.perms[g]
    }

    pub fn child(&self, g: usize, x: usize) -> usize {
        self.children[g][x]
    }

    /// `g ∘ h`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g][h]
    }
}

/// A vertex of `X_k`: 0-based support tuple and decoration (group element indices),
/// the least representative of its orbit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexClass {
    pub support: Vec<usize>,
    pub decoration: Vec<usize>,
}

impl VertexClass {
    /// The orbit representative of `(support, decoration)`.
    pub fn canonical(group: &FiniteGroup, support: &[usize], decoration: &[usize]) -> Self {
        (0..group.order())
            .map(|h| {
                let rho = group.perm(h);
                let support = (0..group.d).map(|x| support[rho.apply(x)]).collect();
                let decoration = (0..group.d)
                    .map(|x| group.mul(decoration[rho.apply(x)], group.child(h, x)))
                    .collect();
                VertexClass { support, decoration }
            })
            .min()
            .expect("the group is non-empty")
    }

    pub fn support_mask(&self) -> u64 {
        self.support.iter().fold(0, |m, &s| m | 1 << s)
    }
}

#[derive(Debug, Clone)]
pub struct FlagComplex {
    k: usize,
    d: usize,
    vertices: Vec<VertexClass>,
    masks: Vec<u64>,
}

/// The ground simplex and its verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grounding {
    pub simplex: Vec<usize>,
    pub dimension: i64,
    pub is_simplex: bool,
    pub max_non_adjacent: usize,
    pub is_ground: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexReport {
    pub k: usize,
    pub d: usize,
    pub group_order: usize,
    pub vertices: usize,
    pub edges: usize,
    pub ground_dimension: i64,
    pub ground_found: bool,
    pub max_non_adjacent: usize,
    pub components: usize,
    pub predicted_connectivity: i64,
    pub connectivity_confirmed: Option<bool>,
}

impl FlagComplex {
    /// Enumerates one vertex per class. Needs `d < k ≤ 64`.
    pub fn build(k: usize, d: usize, group: &FiniteGroup) -> Result<Self> {
        if group.d != d {
            return Err(Error::AlphabetMismatch { left: d, right: group.d });
        }
        if k <= d || k > 64 {
            return Err(Error::InvalidInput(format!("need d < k ≤ 64, got d = {d}, k = {k}")));
        }
        let mut seen = BTreeSet::new();
        for support in ordered_tuples(k, d) {
            for decoration in all_tuples(group.order(), d) {
                seen.insert(VertexClass::canonical(group, &support, &decoration));
            }
        }
        let vertices: Vec<VertexClass> = seen.into_iter().collect();
        let masks = vertices.iter().map(VertexClass::support_mask).collect();
        Ok(FlagComplex { k, d, vertices, masks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[VertexClass] {
        &self.vertices
    }

    pub fn index_of(&self, v: &VertexClass) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    /// Disjoint supports.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.masks[u] & self.masks[v] == 0
    }

    pub fn edge_count(&self) -> usize {
        let n = self.vertices.len();
        (0..n).map(|u| (u + 1..n).filter(|&v| self.adjacent(u, v)).count()).sum()
    }

    /// All cliques with `size` vertices, as sorted index lists.
    pub fn cliques(&self, size: usize) -> Vec<Vec<usize>> {
        fn grow(x: &FlagComplex, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == size {
                out.push(current.clone());
                return;
            }
            let start = current.last().map_or(0, |&v| v + 1);
            for v in start..x.vertices.len() {
                if current.iter().all(|&u| x.adjacent(u, v)) {
                    current.push(v);
                    grow(x, size, current, out);
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        grow(self, size, &mut Vec::new(), &mut out);
        out
    }

    /// The simplex with supports `(1..d), (d+1..2d), …` and trivial decorations, checked to
    /// be a simplex whose every non-neighbour count is at most `d`.
    pub fn grounding(&self, group: &FiniteGroup) -> Grounding {
        let blocks = self.k / self.d;
        let simplex: Vec<usize> = (0..blocks)
            .filter_map(|b| {
                let support: Vec<usize> = (b * self.d..(b + 1) * self.d).collect();
                self.index_of(&VertexClass::canonical(group, &support, &vec![0; self.d]))
            })
            .collect();
        let is_simplex = simplex.len() == blocks
            && simplex.iter().enumerate().all(|(i, &u)| simplex[i + 1..].iter().all(|&v| self.adjacent(u, v)));
        let max_non_adjacent = (0..self.vertices.len())
            .map(|v| simplex.iter().filter(|&&s| !self.adjacent(v, s)).count())
            .max()
            .unwrap_or(0);
        Grounding {
            dimension: blocks as i64 - 1,
            is_simplex,
            max_non_adjacent,
            is_ground: is_simplex && max_non_adjacent <= self.d,
            simplex,
        }
    }

    pub fn components(&self) -> usize {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for (v, done) in seen.iter_mut().enumerate() {
                    if !*done && self.adjacent(u, v) {
                        *done = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }

    /// `⌊(k - d)/d²⌋ - 1`.
    pub fn predicted_connectivity(&self) -> i64 {
        ((self.k - self.d) / (self.d * self.d)) as i64 - 1
    }

    pub fn report(&self, group: &FiniteGroup) -> ComplexReport {
        let ground = self.grounding(group);
        let components = self.components();
        let predicted = self.predicted_connectivity();
        ComplexReport {
            k: self.k,
            d: self.d,
            group_order: group.order(),
            vertices: self.vertices.len(),
            edges: self.edge_count(),
            ground_dimension: ground.dimension,
            ground_found: ground.is_ground,
            max_non_adjacent: ground.max_non_adjacent,
            components,
            predicted_connectivity: predicted,
            connectivity_confirmed: (predicted >= 0).then_some(components == 1),
        }
    }
}

/// Morphism classes that split `carets` strands, enumerated directly and identified under
/// the invertible morphisms at the source by union-find; returns the class count and the
/// vertex sets the classes map to (each must be a distinct clique of `X_k`).
pub fn morphism_classes(
    k: usize,
    d: usize,
    group: &FiniteGroup,
    carets: usize,
) -> Result<(usize, Vec<BTreeSet<VertexClass>>)> {
    let shrink = carets * (d - 1);
    if carets == 0 || k < shrink + carets {
        return Err(Error::InvalidInput(format!("cannot split {carets} strands into {k}")));
    }
    let s = k - shrink;
    let mut all: Vec<Morphism> = Vec::new();
    let mut index: HashMap<Morphism, usize> = HashMap::new();
    for split in subsets(s, carets) {
        for targets in ordered_tuples(k, k) {
            for labels in all_tuples(group.order(), k) {
                let m = Morphism { split: split.clone(), targets: targets.clone(), labels };
                index.insert(m.clone(), all.len());
                all.push(m);
            }
        }
    }
    let mut parent: Vec<usize> = (0..all.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut moves: Vec<(Perm, Vec<usize>)> = (0..s.saturating_sub(1))
        .map(|j| (Perm::transposition(s, j, j + 1), vec![0; s]))
        .collect();
    for j in 0..s {
        for h in 1..group.order() {
            let mut labels = vec![0; s];
            labels[j] = h;
            moves.push((Perm::identity(s), labels));
        }
    }
    for i in 0..all.len() {
        for (tau, hs) in &moves {
            let j = index[&all[i].precompose(group, tau, hs)];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let mut cliques: HashMap<usize, BTreeSet<VertexClass>> = HashMap::new();
    for (i, m) in all.iter().enumerate() {
        let root = find(&mut parent, i);
        let clique = m.vertex_set(group);
        match cliques.get(&root) {
            Some(c) if *c != clique => {
                return Err(Error::InvalidInput("vertex set is not a class invariant".into()))
            }
            Some(_) => {}
            None => {
                cliques.insert(root, clique);
            }
        }
    }
    let mut sets: Vec<BTreeSet<VertexClass>> = cliques.into_values().collect();
    sets.sort();
    Ok((sets.len(), sets))
}

/// Split `split[j]` source strands, then send the expanded slots to `targets` with `labels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Morphism {
    split: Vec<bool>,
    targets: Vec<usize>,
    labels: Vec<usize>,
}

impl Morphism {
    fn slot_starts(&self, d: usize) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.split.len());
        let mut at = 0;
        for &sp in &self.split {
            starts.push(at);
            at += if sp { d } else { 1 };
        }
        starts
    }

    /// `self ∘ (τ, h)`: source strand `j` first goes to strand `τ(j)` carrying `h_j`.
    fn precompose(&self, group: &FiniteGroup, tau: &Perm, hs: &[usize]) -> Morphism {
        let d = group.d;
        let starts = self.slot_starts(d);
        let mut out = Morphism { split: Vec::new(), targets: Vec::new(), labels: Vec::new() };
        for (j, &h) in hs.iter().enumerate() {
            let big = tau.apply(j);
            out.split.push(self.split[big]);
            if self.split[big] {
                for x in 0..d {
                    let old = starts[big] + group.perm(h).apply(x);
                    out.targets.push(self.targets[old]);
                    out.labels.push(group.mul(self.labels[old], group.child(h, x)));
                }
            } else {
                let old = starts[big];
                out.targets.push(self.targets[old]);
                out.labels.push(group.mul(self.labels[old], h));
            }
        }
        out
    }

    fn vertex_set(&self, group: &FiniteGroup) -> BTreeSet<VertexClass> {
        let d = group.d;
        let starts = self.slot_starts(d);
        (0..self.split.len())
            .filter(|&j| self.split[j])
            .map(|j| {
                let r = starts[j]..starts[j] + d;
                VertexClass::canonical(group, &self.targets[r.clone()], &self.labels[r])
            })
            .collect()
    }
}

/// Ordered tuples of `len` distinct elements of `0..n`.
fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(n, len, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, len, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All tuples in `(0..n)^len`.
fn all_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter().flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat())).collect()
    })
}

/// Membership masks of the `size`-subsets of `0..n`.
fn subsets(n: usize, size: usize) -> Vec<Vec<bool>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_two(d: usize) -> FiniteGroup {
        let es = vec!["e"; d].join(", ");
        let mut aut = Automaton::from_definitions(&format!("a = (1 2)({es})")).unwrap();
        let a = aut.lookup("a").unwrap();
        FiniteGroup::generate(&mut aut, &[a], 16).unwrap()
    }

    #[test]
    fn vertex_counts() {
        let trivial = FiniteGroup::trivial(2);
        assert_eq!(FlagComplex::build(3, 2, &trivial).unwrap().vertices().len(), 6);
        assert_eq!(FlagComplex::build(6, 2, &trivial).unwrap().vertices().len(), 30);
        let g = order_two(2);
        assert_eq!(g.order(), 2);
        // three support pairs, each with (2 orders × 4 decorations) / 2
        assert_eq!(FlagComplex::build(3, 2, &g).unwrap().vertices().len(), 12);
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant() {
        let g = order_two(3);
        for support in ordered_tuples(4, 3) {
            for dec in all_tuples(2, 3) {
                let v = VertexClass::canonical(&g, &support, &dec);
                assert_eq!(VertexClass::canonical(&g, &v.support, &v.decoration), v);
            }
        }
    }

    #[test]
    fn adjacency_and_cliques() {
        let trivial = FiniteGroup::trivial(2);
        let x = FlagComplex::build(4, 2, &trivial).unwrap();
        assert!(!x.adjacent(0, 0));
        // 12 vertices; an edge is a pair of disjoint ordered pairs
        assert_eq!(x.edge_count(), 12 * 2 / 2);
        assert_eq!(x.cliques(2).len(), x.edge_count());
        assert!(x.cliques(3).is_empty());
    }

    #[test]
    fn grounding_and_connectivity() {
        let trivial = FiniteGroup::trivial(2);
        let x4 = FlagComplex::build(4, 2, &trivial).unwrap();
        let g4 = x4.grounding(&trivial);
        assert_eq!(g4.dimension, 1);
        assert!(g4.is_ground);
        let x6 = FlagComplex::build(6, 2, &trivial).unwrap();
        let report = x6.report(&trivial);
        assert_eq!((report.ground_dimension, report.predicted_connectivity), (2, 0));
        assert_eq!(report.components, 1);
        assert_eq!(report.connectivity_confirmed, Some(true));
        let x3 = FlagComplex::build(3, 2, &trivial).unwrap();
        assert_eq!(x3.report(&trivial).connectivity_confirmed, None);
    }

    #[test]
    fn cliques_match_morphism_classes() {
        for group in [FiniteGroup::trivial(2), order_two(2)] {
            for k in 3..=4 {
                let x = FlagComplex::build(k, 2, &group).unwrap();
                for carets in 1..=2 {
                    if k < 2 * carets {
                        continue;
                    }
                    let (count, sets) = morphism_classes(k, 2, &group, carets).unwrap();
                    let cliques: BTreeSet<BTreeSet<VertexClass>> = x
                        .cliques(carets)
                        .into_iter()
                        .map(|c| c.into_iter().map(|i| x.vertices()[i].clone()).collect())
                        .collect();
                    assert_eq!(count, cliques.len(), "k = {k}, carets = {carets}");
                    assert_eq!(sets.into_iter().collect::<BTreeSet<_>>(), cliques);
                }
            }
        }
    }
}
