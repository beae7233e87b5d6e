//! Standard examples: the Grigorchuk group on the binary and ternary trees, two affine
//! groups over `F_p(t)`, and the small finite groups used for the complexes.

use crate::agl::{self, Agl1Element, AglCompilation};
use crate::complex::FiniteGroup;
use crate::ff_poly::{parse_rational, Place, PlaceSet};
use crate::mealy::{Automaton, StateId};
use crate::rover::RoverGroup;
use crate::series::CompletionContext;

/// Budget used when closing the fixture groups under taking states.
pub const FIXTURE_MAX_STATES: usize = 256;

pub const GRIGORCHUK_T2: &str = "a = (1 2)(e, e)\nb = (a, c)\nc = (a, d)\nd = (e, b)\n";

/// The 3-persistent extension, as printed alongside the binary recursions.
pub const GRIGORCHUK_T3: &str = "a = (1 2)(e, e, a)\nb = (a, c, b)\nc = (a, d, c)\nd = (e, b, d)\n";

pub const GRIGORCHUK_NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn named(aut: &Automaton, names: &[&str]) -> Vec<StateId> {
    names.iter().map(|n| aut.lookup(n).expect("fixture name")).collect()
}

pub fn grigorchuk_t2() -> (Automaton, Vec<StateId>) {
    let aut = Automaton::from_definitions(GRIGORCHUK_T2).expect("fixture parses");
    let gens = named(&aut, &GRIGORCHUK_NAMES);
    (aut, gens)
}

/// [`grigorchuk_t2`] made 3-persistent by `persist_extend`.
pub fn grigorchuk_t3() -> (Automaton, Vec<StateId>) {
    let (aut, gens) = grigorchuk_t2();
    (aut.persist_extend(), gens)
}

/// `V_3(G)` for the ternary Grigorchuk action.
pub fn grigorchuk_rover() -> RoverGroup {
    let (aut, gens) = grigorchuk_t3();
    RoverGroup::new(aut, gens, FIXTURE_MAX_STATES).expect("finite closure")
}

pub const F2_NAMES: [&str; 3] = ["a", "b", "c"];

/// `a = (1, 1)`, `b = (t, 0)`, `c = (1+t+t², 0)` over `F_2`, completed at `1+t` with `π = 1+t`.
pub fn f2_generators(ctx: &CompletionContext) -> Vec<Agl1Element> {
    ["(1; 1)", "(t; 0)", "(1+t+t^2; 0)"]
        .iter()
        .map(|g| Agl1Element::parse(ctx, g).expect("fixture element"))
        .collect()
}

pub fn f2_compiled() -> (CompletionContext, AglCompilation) {
    let ctx = agl::f2_example_context();
    let gens = f2_generators(&ctx);
    let comp = agl::compile(&ctx, &gens, &F2_NAMES, FIXTURE_MAX_STATES).expect("compiles");
    (ctx, comp)
}

/// `V_3` of the `F_2` example after extending the binary action to a 3-persistent one.
pub fn f2_rover() -> RoverGroup {
    let (ctx, comp) = f2_compiled();
    let aut = comp.automaton.persist_extend();
    RoverGroup::new(aut, comp.generators.clone(), FIXTURE_MAX_STATES)
        .expect("finite closure")
        .with_context(ctx)
}

/// Over `F_3`: `S = {∞, 1+t}`, completion at `t` with `π = t`.
pub fn f3_context() -> CompletionContext {
    let places = PlaceSet::new([Place::Infinity, Place::parse(3, "1+t").expect("valid place")]).expect("non-empty");
    CompletionContext::new(3, Place::at(3, 0), places, parse_rational(3, "t").expect("valid"))
        .expect("valid context")
}

pub const F3_NAMES: [&str; 3] = ["x", "y", "z"];

/// `x = (1, 1)`, `y = (2, 0)`, `z = (1+t, t)`.
pub fn f3_generators(ctx: &CompletionContext) -> Vec<Agl1Element> {
    ["(1; 1)", "(2; 0)", "(1+t; t)"]
        .iter()
        .map(|g| Agl1Element::parse(ctx, g).expect("fixture element"))
        .collect()
}

pub fn f3_compiled() -> (CompletionContext, AglCompilation) {
    let ctx = f3_context();
    let gens = f3_generators(&ctx);
    let comp = agl::compile(&ctx, &gens, &F3_NAMES, FIXTURE_MAX_STATES).expect("compiles");
    (ctx, comp)
}

/// `{id, a}` with `a = (1 2)(id, …, id)` on `d` letters.
pub fn order_two(d: usize) -> FiniteGroup {
    let ids = vec!["e"; d].join(", ");
    let mut aut = Automaton::from_definitions(&format!("a = (1 2)({ids})")).expect("fixture parses");
    let a = aut.lookup("a").expect("defined");
    FiniteGroup::generate(&mut aut, &[a], 4).expect("order two")
}
