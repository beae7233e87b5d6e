//! Acceptance criteria 1 to 9. Each criterion prints one PASS/FAIL line; the test fails if any
//! criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim::agl::{self, Agl1Element};
use selfsim::complex::{morphism_classes, FiniteGroup, FlagComplex, VertexClass};
use selfsim::ff_poly::is_s_integer;
use selfsim::fixtures::{self, GRIGORCHUK_T3};
use selfsim::report::{self, random_expansion, random_integral, random_point, random_rational, ReportConfig};
use selfsim::rover::RoverGroup;
use selfsim::series::EpSeries;

struct Outcome {
    failures: Vec<String>,
    failed: usize,
    checks: usize,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), failed: 0, checks: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(what());
            }
        }
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + criterion)
}

fn rover_groups() -> Vec<(&'static str, RoverGroup)> {
    vec![("grigorchuk", fixtures::grigorchuk_rover()), ("f2", fixtures::f2_rover())]
}

fn criterion_1(out: &mut Outcome) {
    let (ctx, comp) = fixtures::f2_compiled();
    let aut = &comp.automaton;
    let defs = aut.definitions(&comp.generators);
    for line in ["a = (1 2)(e, e)", "b = (b, ab)", "c = (c, bab^-1c)"] {
        out.check(defs.lines().any(|l| l == line), || format!("missing recursion `{line}` in\n{defs}"));
    }
    let gens = fixtures::f2_generators(&ctx);
    let (a, b, c) = (&gens[0], &gens[1], &gens[2]);
    let id = Agl1Element::identity(ctx.p());
    let bab_c = b.mul(a).mul(&b.inverse()).mul(c);
    let expected: [Vec<Agl1Element>; 3] = [
        vec![id.clone(), a.clone()],
        vec![b.clone(), a.mul(b)],
        vec![c.clone(), bab_c.clone(), a.mul(c), a.inverse().mul(&bab_c)],
    ];
    for (g, want) in comp.generators.iter().zip(expected) {
        let got: Vec<Agl1Element> = aut.reachable(&[*g]).iter().map(|&h| comp.element(h).unwrap().clone()).collect();
        let same = got.len() == want.len() && want.iter().all(|w| got.contains(w));
        out.check(same, || format!("state set of {}: got {got:?}, expected {want:?}", aut.name(*g)));
    }
}

fn criterion_2(out: &mut Outcome) {
    let (mut aut, gens) = fixtures::grigorchuk_t2();
    let closure = aut.state_closure(&gens, 64).unwrap();
    out.check(closure.len() == 5, || format!("closure has {} states", closure.len()));
    out.check(aut.is_coarsely_diagonal_upto(&gens, 32), || "not coarsely diagonal within 32".into());
    out.check(aut.persistent_letter(&closure).is_none(), || "T2 group is persistent".into());
    let ext = aut.persist_extend();
    let text = ext.definitions(&gens);
    out.check(text == GRIGORCHUK_T3, || format!("extension differs:\n{text}"));
    let (ext, gens3) = fixtures::grigorchuk_t3();
    out.check(gens3.iter().all(|&g| ext.is_i_persistent(g, 2)), || "extension is not 3-persistent".into());
    out.check(ext.persistent_letter(&gens3) == Some(2), || "persistent letter is not 3".into());
}

fn criterion_3(out: &mut Outcome) {
    let mut rng = rng(3);
    for (name, mut g) in rover_groups() {
        for _ in 0..500 {
            let f = g.random_element(&mut rng, 4);
            let e1 = random_expansion(&g, &f, rng.gen_range(1..6), &mut rng).unwrap();
            let e2 = random_expansion(&g, &f, rng.gen_range(0..6), &mut rng).unwrap();
            let (r, r1, r2) = (g.quasi_retract(&f).unwrap(), g.quasi_retract(&e1).unwrap(), g.quasi_retract(&e2).unwrap());
            let aut = g.automaton();
            out.check(aut.equals(r, r1) && aut.equals(r1, r2), || format!("{name}: retraction of {} changes", g.format(&f)));
        }
        for h in g.closure().to_vec() {
            let r = g.quasi_retract(&g.iota(&[], h)).unwrap();
            out.check(g.automaton().equals(r, h), || format!("{name}: r(iota({})) = {}", g.automaton().name(h), g.automaton().name(r)));
        }
        let gens = g.step_generators();
        for _ in 0..500 {
            let s = gens.choose(&mut rng).unwrap().clone();
            let x = g.random_element(&mut rng, 4);
            let h = g.lipschitz_probe(&x, &s).unwrap();
            out.check(g.in_step_set(h), || format!("{name}: r(sx)r(x)^-1 = {} for s = {}", g.automaton().name(h), g.format(&s)));
        }
    }
}

fn criterion_4(out: &mut Outcome) {
    let mut rng = rng(4);
    for (name, mut g) in rover_groups() {
        let id = g.identity();
        for _ in 0..100 {
            let (x, y, z) = (g.random_element(&mut rng, 3), g.random_element(&mut rng, 3), g.random_element(&mut rng, 3));
            let xy = g.multiply(&x, &y).unwrap();
            let yz = g.multiply(&y, &z).unwrap();
            let left = g.multiply(&xy, &z).unwrap();
            let right = g.multiply(&x, &yz).unwrap();
            out.check(g.equals(&left, &right), || format!("{name}: associativity fails"));
            let xi = g.invert(&x);
            let one = g.multiply(&xi, &x).unwrap();
            out.check(g.equals(&one, &id), || format!("{name}: x^-1 x != id for {}", g.format(&x)));
            let (ix, xi1) = (g.multiply(&id, &x).unwrap(), g.multiply(&x, &id).unwrap());
            out.check(g.equals(&ix, &x) && g.equals(&xi1, &x), || format!("{name}: identity fails"));

            // equals against boundary sampling: equal elements agree everywhere, unequal ones
            // are separated by some sampled point
            let points: Vec<_> = (0..64).map(|_| random_point(&mut rng, g.d(), 8)).collect();
            let agree = |a: &_, b: &_| points.iter().all(|p| g.act_boundary(a, p) == g.act_boundary(b, p));
            out.check(agree(&left, &right), || format!("{name}: boundary action is not associative"));
            out.check(agree(&one, &id), || format!("{name}: boundary action of x^-1 x moves a point"));
            let eq = g.equals(&x, &y);
            out.check(eq == agree(&x, &y), || format!("{name}: equals = {eq} disagrees with sampling"));
            let composed = points.iter().all(|p| g.act_boundary(&xy, p) == g.act_boundary(&x, &g.act_boundary(&y, p)));
            out.check(composed, || format!("{name}: multiply is not composition"));
        }
    }
}

fn criterion_5(out: &mut Outcome) {
    let mut rng = rng(5);
    let mut g = fixtures::f2_rover();
    let images: Vec<_> =
        g.group_generators().to_vec().into_iter().map(|s| g.abelianization_image(&g.iota(&[0], s)).unwrap()).collect();
    out.check(images == [(2, 0, 0), (1, 1, 0), (1, 0, 1)], || format!("generator images {images:?}"));
    for _ in 0..200 {
        let f = g.random_element(&mut rng, 4);
        let h = g.random_element(&mut rng, 4);
        let e = random_expansion(&g, &f, rng.gen_range(1..5), &mut rng).unwrap();
        let (a, b) = (g.abelianization_image(&f).unwrap(), g.abelianization_image(&e).unwrap());
        out.check(a == b, || format!("expansion changes {a:?} to {b:?}"));
        let fh = g.multiply(&f, &h).unwrap();
        let (c, s) = (g.abelianization_image(&h).unwrap(), g.abelianization_image(&fh).unwrap());
        let sum = ((a.0 + c.0) % 4, (a.1 + c.1) % 2, (a.2 + c.2) % 2);
        out.check(s == sum, || format!("{a:?} + {c:?} != {s:?}"));
    }
}

fn criterion_6(out: &mut Outcome) {
    let mut rng = rng(6);
    let contexts = [agl::f2_example_context(), fixtures::f3_context()];
    for ctx in &contexts {
        for _ in 0..500 {
            let f = random_rational(&mut rng, ctx.p(), 6);
            let series = ctx.expand(&f);
            out.check(ctx.to_rational(&series) == f, || format!("round trip of {f} via {series}"));
        }
        for _ in 0..200 {
            let f = random_integral(&mut rng, ctx, 6);
            let j = rng.gen_range(0..8);
            let tail = ctx.to_rational(&ctx.expand(&f).truncate(Some(j), None).shift(j));
            let lhs = is_s_integer(&f, ctx.places());
            out.check(is_s_integer(&tail, ctx.places()) == lhs, || format!("pole lemma fails for {f}, j = {j}"));
        }
    }
    for (ctx, comp) in [fixtures::f2_compiled(), fixtures::f3_compiled()] {
        let mut aut = comp.automaton.clone();
        for g in comp.states() {
            let el = comp.element(g).unwrap();
            out.check(el.in_ring(ctx.places()), || format!("{el} is not over the ring"));
            for h in aut.reachable(&[g]) {
                let hi = aut.inverse(h);
                let x = aut.product(hi, g);
                let xp = aut.power(x, ctx.p() as usize);
                out.check(aut.is_identity(xp), || format!("({}^-1 {})^p != e", aut.name(h), aut.name(g)));
            }
        }
    }
}

fn criterion_7(out: &mut Outcome) {
    for (ctx, comp) in [fixtures::f2_compiled(), fixtures::f3_compiled()] {
        let p = ctx.p();
        let mut words: Vec<Vec<u32>> = vec![Vec::new()];
        for len in 1..=10usize {
            words = words.iter().flat_map(|w| (0..p).map(move |x| [w.clone(), vec![x]].concat())).collect();
            for &g in &comp.generators {
                let el = comp.element(g).unwrap();
                for w in &words {
                    let image = el.act_affine(&ctx, &EpSeries::finite(p, 0, w.clone()));
                    let expected: Vec<usize> = image.digits(0, len as i64).iter().map(|&x| x as usize).collect();
                    let letters: Vec<usize> = w.iter().map(|&x| x as usize).collect();
                    out.check(comp.automaton.act(g, &letters) == expected, || format!("{el} on {w:?}"));
                }
            }
        }
    }
}

fn criterion_8(out: &mut Outcome) {
    for (d, ks) in [(2usize, 3..=8usize), (3, 4..=12)] {
        let group = FiniteGroup::trivial(d);
        for k in ks {
            let x = FlagComplex::build(k, d, &group).unwrap();
            let expected: usize = (k - d + 1..=k).product();
            out.check(x.vertices().len() == expected, || format!("d={d} k={k}: {} vertices", x.vertices().len()));
            let ground = x.grounding(&group);
            out.check(ground.is_ground, || format!("d={d} k={k}: no ground simplex"));
            if x.predicted_connectivity() >= 0 {
                out.check(x.components() == 1, || format!("d={d} k={k}: {} components", x.components()));
            }
        }
    }
    for group in [FiniteGroup::trivial(2), fixtures::order_two(2)] {
        for k in 3..=5usize {
            let x = FlagComplex::build(k, 2, &group).unwrap();
            for carets in 1..=k / 2 {
                let (count, sets) = morphism_classes(k, 2, &group, carets).unwrap();
                let cliques: BTreeSet<BTreeSet<VertexClass>> = x
                    .cliques(carets)
                    .into_iter()
                    .map(|c| c.into_iter().map(|i| x.vertices()[i].clone()).collect())
                    .collect();
                let sets: BTreeSet<_> = sets.into_iter().collect();
                out.check(count == cliques.len() && sets == cliques, || {
                    format!("|G|={} k={k} carets={carets}: {count} classes, {} cliques", group.order(), cliques.len())
                });
            }
        }
    }
}

fn criterion_9(out: &mut Outcome) {
    let config = ReportConfig::default();
    let a = report::run(&config).unwrap();
    let b = report::run(&config).unwrap();
    out.check(a.to_json() == b.to_json(), || "report JSON differs between runs".into());
    out.check(a.passed, || "report has failures".into());
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn(&mut Outcome), Duration);
    let secs = Duration::from_secs;
    let criteria: [Criterion; 9] = [
        (1, "affine compilation of the F2 example", criterion_1, secs(1)),
        (2, "Grigorchuk fixtures", criterion_2, secs(1)),
        (3, "quasi-retraction", criterion_3, secs(60)),
        (4, "group axioms", criterion_4, secs(120)),
        (5, "abelianization", criterion_5, secs(30)),
        (6, "arithmetic", criterion_6, secs(60)),
        (7, "compilation oracle", criterion_7, secs(30)),
        (8, "complexes", criterion_8, secs(120)),
        (9, "determinism", criterion_9, secs(600)),
    ];
    let mut failed = Vec::new();
    for (n, name, run, limit) in criteria {
        let mut out = Outcome::new();
        let start = Instant::now();
        run(&mut out);
        let elapsed = start.elapsed();
        let timely = elapsed <= limit;
        let pass = out.failures.is_empty() && timely;
        println!(
            "criterion {n} ({name}): {} [{} checks, {} failures, {:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.checks,
            out.failed,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        for f in &out.failures {
            println!("    {f}");
        }
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
