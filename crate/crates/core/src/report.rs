//! A deterministic property report over the fixtures. With the same configuration the JSON
//! output is byte-identical between runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::agl::{self, Agl1Element};
use crate::complex::{FiniteGroup, FlagComplex};
use crate::ff_poly::{is_s_integer, Poly, RationalFunction};
use crate::fixtures;
use crate::mealy::BoundaryPoint;
use crate::rover::RoverGroup;
use crate::series::CompletionContext;
use crate::Result;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportConfig {
    pub seed: u64,
    pub samples: usize,
    pub max_states: usize,
    pub max_order: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { seed: 2024, samples: 100, max_states: 256, max_order: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    pub details: Value,
}

impl Section {
    fn new(name: &str) -> Self {
        Section { name: name.to_string(), checks: 0, failures: 0, details: json!({}) }
    }

    fn record(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: ReportConfig,
    pub passed: bool,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every section; each section draws from its own stream derived from the seed.
pub fn run(config: &ReportConfig) -> Result<Report> {
    let rng = |i: u64| ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9).wrapping_add(i));
    let sections = vec![
        affine_compilation()?,
        grigorchuk(config)?,
        quasi_retraction(config, &mut rng(3))?,
        group_axioms(config, &mut rng(4))?,
        abelianization(config, &mut rng(5))?,
        arithmetic(config, &mut rng(6))?,
        compilation_oracle(8)?,
        complexes()?,
    ];
    let passed = sections.iter().all(|s| s.failures == 0);
    Ok(Report { schema: SCHEMA, config: *config, passed, sections })
}

fn affine_compilation() -> Result<Section> {
    let mut sec = Section::new("affine_compilation");
    let (_, comp) = fixtures::f2_compiled();
    let aut = &comp.automaton;
    let defs = aut.definitions(&comp.generators);
    for line in ["a = (1 2)(e, e)", "b = (b, ab)", "c = (c, bab^-1c)"] {
        sec.record(defs.lines().any(|l| l == line));
    }
    let sizes: Vec<usize> = comp.generators.iter().map(|&g| aut.reachable(&[g]).len()).collect();
    sec.record(sizes == [2, 2, 4]);
    sec.details = json!({ "definitions": defs, "state_counts": sizes });
    Ok(sec)
}

fn grigorchuk(config: &ReportConfig) -> Result<Section> {
    let mut sec = Section::new("grigorchuk");
    let (mut aut, gens) = fixtures::grigorchuk_t2();
    let closure = aut.state_closure(&gens, config.max_states)?;
    sec.record(closure.len() == 5);
    let diagonal = aut.is_coarsely_diagonal_upto(&gens, 32);
    sec.record(diagonal);
    let persistent = aut.persistent_letter(&closure);
    sec.record(persistent.is_none());
    let ext = aut.persist_extend();
    let verbatim = ext.definitions(&gens) == fixtures::GRIGORCHUK_T3;
    sec.record(verbatim);
    let ext_persistent = gens.iter().all(|&g| ext.is_i_persistent(g, 2));
    sec.record(ext_persistent);
    sec.details = json!({
        "closure": closure.len(),
        "coarsely_diagonal_32": diagonal,
        "persistent_letter": persistent.map(|i| i + 1),
        "extension_verbatim": verbatim,
        "extension_3_persistent": ext_persistent,
    });
    Ok(sec)
}

fn rover_groups() -> Vec<(&'static str, RoverGroup)> {
    vec![("grigorchuk", fixtures::grigorchuk_rover()), ("f2", fixtures::f2_rover())]
}

/// Expands a random sequence of leaves.
pub fn random_expansion<R: Rng>(
    g: &RoverGroup,
    f: &crate::rover::RoverElement,
    steps: usize,
    rng: &mut R,
) -> Result<crate::rover::RoverElement> {
    let mut e = f.clone();
    for _ in 0..steps {
        let k = rng.gen_range(0..e.len());
        e = g.expand_leaf(&e, k)?;
    }
    Ok(e)
}

fn quasi_retraction<R: Rng>(config: &ReportConfig, rng: &mut R) -> Result<Section> {
    let mut sec = Section::new("quasi_retraction");
    let mut counts = Vec::new();
    for (name, mut g) in rover_groups() {
        let before = sec.checks;
        for _ in 0..config.samples {
            let f = g.random_element(rng, 3);
            let e1 = random_expansion(&g, &f, rng.gen_range(0..4), rng)?;
            let e2 = random_expansion(&g, &f, rng.gen_range(0..4), rng)?;
            let (r1, r2) = (g.quasi_retract(&e1)?, g.quasi_retract(&e2)?);
            sec.record(g.automaton().equals(r1, r2));
        }
        for h in g.closure().to_vec() {
            let iota = g.iota(&[], h);
            sec.record(g.quasi_retract(&iota)? == h);
        }
        let gens = g.step_generators();
        for _ in 0..config.samples {
            let s = gens.choose(rng).expect("non-empty").clone();
            let x = g.random_element(rng, 3);
            let h = g.lipschitz_probe(&x, &s)?;
            sec.record(g.in_step_set(h));
        }
        counts.push(json!({ "group": name, "checks": sec.checks - before }));
    }
    sec.details = json!(counts);
    Ok(sec)
}

fn group_axioms<R: Rng>(config: &ReportConfig, rng: &mut R) -> Result<Section> {
    let mut sec = Section::new("group_axioms");
    for (_, mut g) in rover_groups() {
        let id = g.identity();
        for _ in 0..config.samples {
            let (x, y, z) = (g.random_element(rng, 2), g.random_element(rng, 2), g.random_element(rng, 2));
            let xy = g.multiply(&x, &y)?;
            let yz = g.multiply(&y, &z)?;
            let left = g.multiply(&xy, &z)?;
            let right = g.multiply(&x, &yz)?;
            sec.record(g.equals(&left, &right));
            let xi = g.invert(&x);
            let one = g.multiply(&x, &xi)?;
            sec.record(g.equals(&one, &id));
            let x1 = g.multiply(&id, &x)?;
            sec.record(g.equals(&x1, &x));
            let point = random_point(rng, g.d(), 8);
            sec.record(g.act_boundary(&left, &point) == g.act_boundary(&x, &g.act_boundary(&yz, &point)));
        }
    }
    Ok(sec)
}

/// A random eventually periodic point with preperiod and period of length below `len`.
pub fn random_point<R: Rng>(rng: &mut R, d: usize, len: usize) -> BoundaryPoint {
    let pre = (0..rng.gen_range(0..len)).map(|_| rng.gen_range(0..d)).collect();
    let per = (0..rng.gen_range(1..len)).map(|_| rng.gen_range(0..d)).collect();
    BoundaryPoint::new(pre, per).expect("non-empty period")
}

fn abelianization<R: Rng>(config: &ReportConfig, rng: &mut R) -> Result<Section> {
    let mut sec = Section::new("abelianization");
    let mut g = fixtures::f2_rover();
    let mut images = Vec::new();
    for gen in g.group_generators().to_vec() {
        let image = g.abelianization_image(&g.iota(&[0], gen))?;
        images.push(image);
    }
    sec.record(images == [(2, 0, 0), (1, 1, 0), (1, 0, 1)]);
    for _ in 0..config.samples {
        let f = g.random_element(rng, 3);
        let h = g.random_element(rng, 3);
        let e = random_expansion(&g, &f, 2, rng)?;
        let (a, b) = (g.abelianization_image(&f)?, g.abelianization_image(&e)?);
        sec.record(a == b);
        let fh = g.multiply(&f, &h)?;
        let (c, s) = (g.abelianization_image(&h)?, g.abelianization_image(&fh)?);
        sec.record(s == ((a.0 + c.0) % 4, (a.1 + c.1) % 2, (a.2 + c.2) % 2));
    }
    sec.details = json!({ "generators": images });
    Ok(sec)
}

/// A polynomial of degree below `len` with random coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, p: u32, len: usize) -> Poly {
    Poly::from_residues(p, (0..len).map(|_| rng.gen_range(0..p)).collect())
}

/// A random rational function with numerator and denominator of degree below `len`.
pub fn random_rational<R: Rng>(rng: &mut R, p: u32, len: usize) -> RationalFunction {
    loop {
        let den = random_poly(rng, p, len);
        if !den.is_zero() {
            return RationalFunction::new(random_poly(rng, p, len), den).expect("nonzero denominator");
        }
    }
}

/// A random rational function with no pole at the completion place.
pub fn random_integral<R: Rng>(rng: &mut R, ctx: &CompletionContext, len: usize) -> RationalFunction {
    loop {
        let f = random_rational(rng, ctx.p(), len);
        if ctx.expand(&f).is_integral() {
            return f;
        }
    }
}

fn arithmetic<R: Rng>(config: &ReportConfig, rng: &mut R) -> Result<Section> {
    let mut sec = Section::new("arithmetic");
    let contexts = [agl::f2_example_context(), fixtures::f3_context()];
    for ctx in &contexts {
        for _ in 0..config.samples {
            let f = random_rational(rng, ctx.p(), 5);
            sec.record(ctx.to_rational(&ctx.expand(&f)) == f);
            let f = random_integral(rng, ctx, 5);
            let j = rng.gen_range(0..6);
            let tail = ctx.to_rational(&ctx.expand(&f).truncate(Some(j), None).shift(j));
            sec.record(is_s_integer(&tail, ctx.places()) == is_s_integer(&f, ctx.places()));
        }
    }
    for (ctx, comp) in [fixtures::f2_compiled(), fixtures::f3_compiled()] {
        let mut aut = comp.automaton.clone();
        for g in comp.states() {
            let el = comp.element(g).expect("compiled state");
            sec.record(el.in_ring(ctx.places()));
            for h in aut.reachable(&[g]) {
                let hi = aut.inverse(h);
                let x = aut.product(hi, g);
                let xp = aut.power(x, ctx.p() as usize);
                sec.record(aut.is_identity(xp));
            }
        }
    }
    Ok(sec)
}

/// Compares the compiled action with `act_affine` on all digit words up to `max_len`.
pub fn compilation_oracle(max_len: usize) -> Result<Section> {
    let mut sec = Section::new("compilation_oracle");
    let mut words_checked = Vec::new();
    for (ctx, comp) in [fixtures::f2_compiled(), fixtures::f3_compiled()] {
        let p = ctx.p();
        let before = sec.checks;
        let mut words: Vec<Vec<u32>> = vec![Vec::new()];
        for len in 1..=max_len {
            words = words
                .iter()
                .flat_map(|w| (0..p).map(move |x| [w.clone(), vec![x]].concat()))
                .collect();
            for &g in &comp.generators {
                let el = comp.element(g).expect("generator is compiled");
                for w in &words {
                    sec.record(affine_agrees(&ctx, &comp.automaton, g, el, w, len));
                }
            }
        }
        words_checked.push(sec.checks - before);
    }
    sec.details = json!({ "max_length": max_len, "checks_per_fixture": words_checked });
    Ok(sec)
}

fn affine_agrees(
    ctx: &CompletionContext,
    aut: &crate::mealy::Automaton,
    g: usize,
    el: &Agl1Element,
    w: &[u32],
    len: usize,
) -> bool {
    let gamma = crate::series::EpSeries::finite(ctx.p(), 0, w.to_vec());
    let image = el.act_affine(ctx, &gamma);
    let letters: Vec<usize> = w.iter().map(|&x| x as usize).collect();
    let expected: Vec<usize> = image.digits(0, len as i64).iter().map(|&x| x as usize).collect();
    aut.act(g, &letters) == expected
}

fn complexes() -> Result<Section> {
    let mut sec = Section::new("complexes");
    let mut rows = Vec::new();
    let sweeps: Vec<(usize, std::ops::RangeInclusive<usize>)> = vec![(2, 3..=8), (3, 4..=12)];
    for (d, ks) in sweeps {
        let group = FiniteGroup::trivial(d);
        for k in ks {
            let x = FlagComplex::build(k, d, &group)?;
            let report = x.report(&group);
            let expected = (k - d + 1..=k).product::<usize>();
            sec.record(report.vertices == expected);
            sec.record(report.ground_found);
            if let Some(ok) = report.connectivity_confirmed {
                sec.record(ok);
            }
            rows.push(report);
        }
    }
    sec.details = serde_json::to_value(rows).expect("rows serialize");
    Ok(sec)
}
