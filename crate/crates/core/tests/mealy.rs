use std::collections::BTreeSet;

use proptest::prelude::*;

use selfsim::fixtures;
use selfsim::mealy::{Automaton, StateId};

const LAMPLIGHTER: &str = "a = (1 2)(b, a)\nb = (a, b)\n";
const ADDING_MACHINE: &str = "a = (1 2)(e, a)\n";

/// Fixture automata with their generators, closed under states and inverses.
fn fixture(i: usize) -> (Automaton, Vec<StateId>) {
    let (mut aut, gens) = match i {
        0 => fixtures::grigorchuk_t2(),
        1 => fixtures::grigorchuk_t3(),
        2 => {
            let (_, comp) = fixtures::f2_compiled();
            (comp.automaton, comp.generators)
        }
        3 => {
            let (_, comp) = fixtures::f3_compiled();
            (comp.automaton, comp.generators)
        }
        4 => {
            let aut = Automaton::from_definitions(LAMPLIGHTER).unwrap();
            let gens = vec![aut.lookup("a").unwrap(), aut.lookup("b").unwrap()];
            (aut, gens)
        }
        _ => {
            let aut = Automaton::from_definitions(ADDING_MACHINE).unwrap();
            let gens = vec![aut.lookup("a").unwrap()];
            (aut, gens)
        }
    };
    let closure = aut.state_closure(&gens, 256).unwrap();
    (aut, closure)
}

fn all_words(d: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.iter().flat_map(|w| (0..d).map(move |x| [w.clone(), vec![x]].concat())).collect()
    })
}

/// Action computed letter by letter from the raw recursion, independent of `act`.
fn act_by_recursion(aut: &Automaton, mut g: StateId, w: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(w.len());
    for &x in w {
        out.push(aut.perm(g).apply(x));
        g = aut.children(g)[x];
    }
    out
}

fn setup() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>, Vec<usize>)> {
    (0usize..6).prop_flat_map(|i| {
        let d: usize = if i == 1 || i == 3 { 3 } else { 2 };
        (
            Just(i),
            prop::collection::vec(0usize..64, 1..5),
            prop::collection::vec(0usize..64, 1..5),
            prop::collection::vec(0..d, 0..=8),
        )
    })
}

fn word_element(aut: &mut Automaton, closure: &[StateId], picks: &[usize]) -> StateId {
    let word: Vec<StateId> = picks.iter().map(|&k| closure[k % closure.len()]).collect();
    aut.product_all(&word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_composition((i, fp, gp, w) in setup()) {
        let (mut aut, closure) = fixture(i);
        let f = word_element(&mut aut, &closure, &fp);
        let g = word_element(&mut aut, &closure, &gp);
        let fg = aut.product(f, g);
        prop_assert_eq!(aut.act(fg, &w), aut.act(f, &aut.act(g, &w)));
        prop_assert_eq!(aut.act(f, &w), act_by_recursion(&aut, f, &w));
    }

    #[test]
    fn wreath_cocycle((i, fp, gp, w) in setup()) {
        let (mut aut, closure) = fixture(i);
        let f = word_element(&mut aut, &closure, &fp);
        let g = word_element(&mut aut, &closure, &gp);
        let w = &w[..w.len().min(4)];
        let fg = aut.product(f, g);
        let lhs = aut.state_at(fg, w);
        let (fs, gs) = (aut.state_at(f, &aut.act(g, w)), aut.state_at(g, w));
        let rhs = aut.product(fs, gs);
        prop_assert!(aut.equals(lhs, rhs));
    }

    #[test]
    fn equals_matches_the_action((i, fp, gp, _w) in setup()) {
        let (mut aut, closure) = fixture(i);
        let f = word_element(&mut aut, &closure, &fp);
        let g = word_element(&mut aut, &closure, &gp);
        let depth = if aut.d() == 2 { 8 } else { 6 };
        let agree = all_words(aut.d(), depth).iter().all(|w| aut.act(f, w) == aut.act(g, w));
        if aut.equals(f, g) {
            prop_assert!(agree);
        } else {
            // a difference must show up within the product automaton's size; the
            // fixtures' products separate within the sampled depth
            prop_assert!(!agree, "{} and {} agree to depth {}", aut.name(f), aut.name(g), depth);
        }
        prop_assert!(aut.equals(f, f));
        prop_assert_eq!(aut.equals(f, g), aut.equals(g, f));
    }
}

#[test]
fn inverses_of_closure_states() {
    for i in 0..6 {
        let (mut aut, closure) = fixture(i);
        for &g in &closure {
            let gi = aut.inverse(g);
            let (l, r) = (aut.product(g, gi), aut.product(gi, g));
            assert!(aut.is_identity(l) && aut.is_identity(r), "fixture {i}, state {}", aut.name(g));
        }
    }
}

#[test]
fn levels_are_permuted() {
    for i in 0..6 {
        let (aut, closure) = fixture(i);
        let max_len = if aut.d() == 2 { 6 } else { 5 };
        for len in 1..=max_len {
            let words = all_words(aut.d(), len);
            for &g in &closure {
                let images: BTreeSet<Vec<usize>> = words.iter().map(|w| aut.act(g, w)).collect();
                assert_eq!(images.len(), words.len(), "fixture {i}, level {len}");
            }
        }
    }
}

#[test]
fn persistent_extension_keeps_the_states() {
    for i in 0..6 {
        let (aut, closure) = fixture(i);
        let mut ext = aut.persist_extend();
        let ext_closure = ext.state_closure(&closure, 256).unwrap();
        assert_eq!(ext_closure.len(), closure.len(), "fixture {i}");
        assert!(ext_closure.iter().all(|&g| ext.is_i_persistent(g, aut.d())), "fixture {i}");
        // the extension restricts to the original action on old letters
        for w in all_words(aut.d(), 5) {
            for &g in &closure {
                assert_eq!(ext.act(g, &w), aut.act(g, &w));
            }
        }
    }
}

#[test]
fn definitions_round_trip() {
    for i in 0..6 {
        let (aut, closure) = fixture(i);
        let text = aut.definitions(&closure);
        let back = Automaton::from_definitions(&text).unwrap();
        for &g in &closure {
            let h = back.lookup(&aut.name(g)).unwrap();
            for w in all_words(aut.d(), 4) {
                assert_eq!(back.act(h, &w), aut.act(g, &w), "fixture {i}");
            }
        }
    }
}

#[test]
fn infinite_order_is_not_reported_finite() {
    let (mut aut, closure) = fixture(5);
    let a = aut.lookup("a").unwrap();
    assert_eq!(aut.has_finite_order_upto(a, 64), None);
    assert!(!aut.is_coarsely_diagonal_upto(&closure, 16));
    let (mut grig, _) = fixture(0);
    let (a, b) = (grig.lookup("a").unwrap(), grig.lookup("b").unwrap());
    let ab = grig.product(a, b);
    assert_eq!(grig.has_finite_order_upto(ab, 32), Some(16));
}

#[test]
fn conjugation_by_a_transposition() {
    let (aut, closure) = fixture(1);
    let conj = aut.conjugate_by_transposition(0, 2);
    let swap = |w: &[usize]| w.iter().map(|&x| [2, 1, 0][x]).collect::<Vec<_>>();
    for w in all_words(3, 4) {
        for &g in &closure {
            assert_eq!(conj.act(g, &w), swap(&aut.act(g, &swap(&w))));
        }
    }
}
