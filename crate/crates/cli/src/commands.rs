use std::fmt::Write;

use serde_json::{json, Value};
use selfsim::agl::Agl1Element;
use selfsim::complex::{FiniteGroup, FlagComplex};
use selfsim::fixtures;
use selfsim::mealy::{format_word, parse_word, Automaton, StateId};
use selfsim::report::{self, ReportConfig};
use selfsim::rover::{RoverElement, RoverGroup};
use selfsim::series::EpSeries;
use selfsim::{Error, Result};

use crate::session::{Group, Session};
use crate::{Cli, Command, Format};

/// What a command prints and whether the property it reports holds.
pub struct Outcome {
    pub output: String,
    pub holds: bool,
}

struct Rendered {
    text: String,
    json: Value,
    dot: Option<String>,
    holds: bool,
}

impl Rendered {
    fn new(text: String, json: Value) -> Self {
        Rendered { text, json, dot: None, holds: true }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let max_states = cli.max_states as usize;
    let mut session = match &cli.defs {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            Session::parse(&text, max_states)?
        }
        None => Session::default(),
    };
    add_builtins(&mut session);
    let args: Vec<&str> = cli.args.iter().map(String::as_str).collect();
    let rendered = match cli.cmd {
        Command::States => states(&session, &args, max_states)?,
        Command::Eval => eval(&session, &args)?,
        Command::Check => check(&session, &args, cli)?,
        Command::Persist => persist(&session, &args)?,
        Command::CompileAgl => compile_agl(&session, &args)?,
        Command::Rover => rover(&session, &args, max_states)?,
        Command::Complex => complex(&session, &args, cli.max_order as usize)?,
        Command::Dot => {
            let mut r = states(&session, &args, max_states)?;
            r.text = r.dot.clone().unwrap_or_default();
            r
        }
        Command::Report => run_report(cli)?,
    };
    let mut json = rendered.json;
    if let Value::Object(map) = &mut json {
        map.insert("schema".into(), json!(report::SCHEMA));
        map.insert("command".into(), json!(format!("{:?}", cli.cmd).to_lowercase()));
        map.insert("holds".into(), json!(rendered.holds));
    }
    let output = match cli.out {
        Format::Text => rendered.text,
        Format::Json => serde_json::to_string_pretty(&json).expect("json") + "\n",
        Format::Dot => rendered
            .dot
            .ok_or_else(|| Error::InvalidInput("this command has no DOT output".into()))?,
    };
    Ok(Outcome { output, holds: rendered.holds })
}

/// Built-in groups, available unless the definitions file reuses the name.
fn add_builtins(session: &mut Session) {
    let mut add = |name: &str, automaton: Automaton, generators: Vec<StateId>, ctx, elements| {
        session
            .groups
            .entry(name.to_string())
            .or_insert(Group { automaton, generators, context: ctx, elements });
    };
    let (aut, gens) = fixtures::grigorchuk_t2();
    add("grigorchuk", aut, gens, None, Default::default());
    let (aut, gens) = fixtures::grigorchuk_t3();
    add("grigorchuk3", aut, gens, None, Default::default());
    for (name, (ctx, comp)) in [("f2", fixtures::f2_compiled()), ("f3", fixtures::f3_compiled())] {
        let elements = comp.states().into_iter().map(|g| (g, comp.element(g).expect("compiled").clone())).collect();
        add(name, comp.automaton, comp.generators, Some(ctx), elements);
    }
    let (_, comp) = fixtures::f2_compiled();
    let ctx = selfsim::agl::f2_example_context();
    add("f2_t3", comp.automaton.persist_extend(), comp.generators, Some(ctx), Default::default());
}

fn need<'a>(args: &[&'a str], i: usize, what: &str) -> Result<&'a str> {
    args.get(i).copied().ok_or_else(|| Error::Parse(format!("missing argument: {what}")))
}

fn state(aut: &Automaton, name: &str) -> Result<StateId> {
    aut.resolve(name).ok_or_else(|| Error::Parse(format!("unknown state `{name}`")))
}

fn row(aut: &Automaton, g: StateId) -> String {
    let children: Vec<String> = aut.children(g).iter().map(|&c| aut.name(c)).collect();
    format!("{} = {}({})", aut.name(g), aut.perm(g).cycle_string(), children.join(", "))
}

fn states(session: &Session, args: &[&str], max_states: usize) -> Result<Rendered> {
    let name = need(args, 0, "group")?;
    let group = session.group(name)?;
    let mut aut = group.automaton.clone();
    let list = match args.get(1) {
        Some(g) => aut.reachable(&[state(&aut, g)?]),
        None => aut.state_closure(&group.generators, max_states)?,
    };
    if list.len() > max_states {
        return Err(Error::BudgetExceeded { limit: max_states });
    }
    let mut text = format!("{} states\n", list.len());
    let mut rows = Vec::new();
    for &g in &list {
        let pair = group.elements.get(&g);
        text.push_str(&row(&aut, g));
        if let Some(el) = pair {
            write!(text, "    # {el}").expect("string");
        }
        text.push('\n');
        rows.push(json!({
            "name": aut.name(g),
            "perm": aut.perm(g).one_line_string(),
            "children": aut.children(g).iter().map(|&c| aut.name(c)).collect::<Vec<_>>(),
            "affine": pair.map(|el| el.to_string()),
        }));
    }
    let mut r = Rendered::new(text, json!({ "group": name, "count": list.len(), "states": rows }));
    r.dot = Some(aut.to_dot(&list));
    Ok(r)
}

fn eval(session: &Session, args: &[&str]) -> Result<Rendered> {
    let group = session.group(need(args, 0, "group")?)?;
    let element = need(args, 1, "element")?;
    let word_text = need(args, 2, "word")?;
    let aut = &group.automaton;
    let d = aut.d();
    let word = parse_word(d, word_text)?;
    let (image, affine) = if element.trim_start().starts_with('(') {
        let ctx = group.context.as_ref().ok_or_else(|| Error::WrongContext("group has no affine context".into()))?;
        let el = Agl1Element::parse(ctx, element)?;
        (affine_image(ctx, &el, &word)?, None)
    } else {
        let g = state(aut, element)?;
        let image = aut.act(g, &word);
        let affine = match (&group.context, group.elements.get(&g)) {
            (Some(ctx), Some(el)) => Some(affine_image(ctx, el, &word)?),
            _ => None,
        };
        (image, affine)
    };
    let holds = affine.as_ref().is_none_or(|a| *a == image);
    let mut r = Rendered::new(
        format!("{}\n", format_word(d, &image)),
        json!({ "element": element, "word": format_word(d, &word), "image": format_word(d, &image) }),
    );
    r.holds = holds;
    Ok(r)
}

fn affine_image(ctx: &selfsim::series::CompletionContext, el: &Agl1Element, word: &[usize]) -> Result<Vec<usize>> {
    let p = ctx.p() as usize;
    if let Some(&bad) = word.iter().find(|&&x| x >= p) {
        return Err(Error::InvalidInput(format!("letter {} is not a residue mod {p}", bad + 1)));
    }
    let gamma = EpSeries::finite(ctx.p(), 0, word.iter().map(|&x| x as u32).collect());
    let image = el.act_affine(ctx, &gamma);
    Ok(image.digits(0, word.len() as i64).iter().map(|&x| x as usize).collect())
}

fn check(session: &Session, args: &[&str], cli: &Cli) -> Result<Rendered> {
    let name = need(args, 0, "group")?;
    let property = need(args, 1, "property")?;
    let group = session.group(name)?;
    let mut aut = group.automaton.clone();
    let closure = aut.state_closure(&group.generators, cli.max_states as usize)?;
    let (holds, detail) = match property {
        "self-similar" => {
            let inside: std::collections::HashSet<_> = closure.iter().collect();
            let ok = closure.iter().all(|&g| aut.children(g).iter().all(|c| inside.contains(c)));
            (ok, json!({ "states": closure.len() }))
        }
        "finite-state" => (true, json!({ "states": closure.len() })),
        "persistent" => {
            let letter = aut.persistent_letter(&closure);
            (letter.is_some(), json!({ "letter": letter.map(|i| i + 1) }))
        }
        "coarsely-diagonal" => {
            let bound = cli.max_order as usize;
            (aut.is_coarsely_diagonal_upto(&group.generators, bound), json!({ "bound": bound }))
        }
        other => return Err(Error::Parse(format!("unknown property `{other}`"))),
    };
    let mut text = if holds { "yes".to_string() } else { "no".to_string() };
    if let Some(i) = detail.get("letter").and_then(Value::as_u64) {
        write!(text, " (letter {i})").expect("string");
    }
    text.push('\n');
    let mut r = Rendered::new(text, json!({ "group": name, "property": property, "verdict": holds, "detail": detail }));
    r.holds = holds;
    Ok(r)
}

fn persist(session: &Session, args: &[&str]) -> Result<Rendered> {
    let name = need(args, 0, "group")?;
    let group = session.group(name)?;
    let d = group.automaton.d() + 1;
    let target = match args.get(1) {
        Some(i) => i
            .parse::<usize>()
            .ok()
            .filter(|i| (1..=d).contains(i))
            .ok_or_else(|| Error::Parse(format!("letter must be in 1..={d}, got `{i}`")))?,
        None => d,
    };
    let mut aut = group.automaton.persist_extend();
    if target != d {
        aut = aut.conjugate_by_transposition(target - 1, d - 1);
    }
    let states = aut.reachable(&group.generators);
    let holds = states.iter().all(|&g| aut.is_i_persistent(g, target - 1));
    let defs = aut.definitions(&group.generators);
    let mut r = Rendered::new(defs.clone(), json!({ "group": name, "letter": target, "definitions": defs }));
    r.dot = Some(aut.to_dot(&group.generators));
    r.holds = holds;
    Ok(r)
}

fn compile_agl(session: &Session, args: &[&str]) -> Result<Rendered> {
    let name = need(args, 0, "affine group")?;
    let group = session.group(name)?;
    if group.context.is_none() {
        return Err(Error::WrongContext(format!("`{name}` is not an affine group")));
    }
    let aut = &group.automaton;
    let defs = aut.definitions(&group.generators);
    let mut ids: Vec<&StateId> = group.elements.keys().collect();
    ids.sort();
    let pairs: Vec<Value> = ids
        .iter()
        .map(|&&g| json!({ "name": aut.name(g), "affine": group.elements[&g].to_string() }))
        .collect();
    let mut r = Rendered::new(defs.clone(), json!({ "group": name, "definitions": defs, "states": pairs }));
    r.dot = Some(aut.to_dot(&group.generators));
    Ok(r)
}

fn rover_group(session: &Session, name: &str, max_states: usize) -> Result<(RoverGroup, Vec<(String, RoverElement)>)> {
    if session.rovers.contains_key(name) {
        let (g, els) = session.rover(name, max_states)?;
        return Ok((g, els.into_iter().collect()));
    }
    let group = session.group(name)?;
    let mut g = RoverGroup::new(group.automaton.clone(), group.generators.clone(), max_states)?;
    if let Some(ctx) = &group.context {
        g = g.with_context(ctx.clone());
    }
    Ok((g, Vec::new()))
}

/// A named element, a literal `[T- ; sigma ; states ; T+]`, or `iota(<word>, <state>)`.
fn element(g: &RoverGroup, named: &[(String, RoverElement)], text: &str) -> Result<RoverElement> {
    if let Some((_, e)) = named.iter().find(|(n, _)| n == text) {
        return Ok(e.clone());
    }
    if let Some(inner) = text.trim().strip_prefix("iota(").and_then(|t| t.strip_suffix(')')) {
        let (u, s) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("expected iota(word, state), got `{text}`")))?;
        let u = parse_word(g.d(), u)?;
        return Ok(g.iota(&u, state(g.automaton(), s.trim())?));
    }
    if text.trim_start().starts_with('[') {
        let e = g.parse(text)?;
        g.check(&e)?;
        return Ok(e);
    }
    Err(Error::Parse(format!("unknown element `{text}`")))
}

fn rover(session: &Session, args: &[&str], max_states: usize) -> Result<Rendered> {
    let name = need(args, 0, "rover section or group")?;
    let op = need(args, 1, "operation")?;
    let (mut g, named) = rover_group(session, name, max_states)?;
    let operands = if op == "expand" { &args[2..args.len().min(3)] } else { &args[2..] };
    let els = operands.iter().map(|t| element(&g, &named, t)).collect::<Result<Vec<_>>>()?;
    let arity = |n: usize| {
        if els.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("`{op}` takes {n} element(s), got {}", els.len())))
        }
    };
    let show = |g: &RoverGroup, e: &RoverElement| Rendered::new(format!("{}\n", g.format(e)), json!({ "element": g.to_json(e) }));
    let r = match op {
        "mul" => {
            if els.is_empty() {
                return Err(Error::Parse("`mul` needs at least one element".into()));
            }
            let mut acc = els[0].clone();
            for e in &els[1..] {
                acc = g.multiply(&acc, e)?;
            }
            let acc = g.reduce(&acc);
            show(&g, &acc)
        }
        "inv" => {
            arity(1)?;
            let e = g.invert(&els[0]);
            let e = g.reduce(&e);
            show(&g, &e)
        }
        "eq" => {
            arity(2)?;
            let eq = g.equals(&els[0], &els[1]);
            Rendered::new(format!("{eq}\n"), json!({ "equal": eq }))
        }
        "expand" => {
            arity(1)?;
            if args.len() > 4 {
                return Err(Error::Parse("`expand` takes an element and a leaf index".into()));
            }
            let k: usize = need(args, 3, "leaf")?
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Parse("leaf index must be a positive integer".into()))?;
            show(&g, &g.expand_leaf(&els[0], k - 1)?)
        }
        "retract" => {
            arity(1)?;
            let h = g.quasi_retract(&els[0])?;
            let name = g.automaton().name(h);
            Rendered::new(format!("{name}\n"), json!({ "retract": name }))
        }
        "abelianize" => {
            arity(1)?;
            let (a, b, c) = g.abelianization_image(&els[0])?;
            Rendered::new(format!("({a}, {b}, {c})\n"), json!({ "image": [a, b, c] }))
        }
        other => return Err(Error::Parse(format!("unknown rover operation `{other}`"))),
    };
    Ok(r)
}

fn complex(session: &Session, args: &[&str], max_order: usize) -> Result<Rendered> {
    let num = |i: usize, what: &str| -> Result<usize> {
        need(args, i, what)?.parse().map_err(|_| Error::Parse(format!("{what} must be a number")))
    };
    let (k, d) = (num(0, "k")?, num(1, "d")?);
    if d < 2 {
        return Err(Error::InvalidInput("d must be at least 2".into()));
    }
    let group = match args.get(2).copied().unwrap_or("trivial") {
        "trivial" => FiniteGroup::trivial(d),
        "order2" => fixtures::order_two(d),
        name => {
            let g = session.group(name)?;
            let mut aut = g.automaton.clone();
            FiniteGroup::generate(&mut aut, &g.generators, max_order)?
        }
    };
    let x = FlagComplex::build(k, d, &group)?;
    let rep = x.report(&group);
    let holds = rep.ground_found && rep.connectivity_confirmed != Some(false);
    let text = format!(
        "k = {}, d = {}, |G| = {}\nvertices: {}\nedges: {}\nground simplex: dimension {}, {}\nmax non-adjacent: {}\ncomponents: {}\npredicted connectivity: {}\n",
        rep.k,
        rep.d,
        rep.group_order,
        rep.vertices,
        rep.edges,
        rep.ground_dimension,
        if rep.ground_found { "verified" } else { "FAILED" },
        rep.max_non_adjacent,
        rep.components,
        rep.predicted_connectivity,
    );
    let mut r = Rendered::new(text, json!({ "report": rep }));
    r.holds = holds;
    Ok(r)
}

fn run_report(cli: &Cli) -> Result<Rendered> {
    let config = ReportConfig {
        seed: cli.seed,
        samples: cli.samples as usize,
        max_states: cli.max_states as usize,
        max_order: cli.max_order as usize,
    };
    let rep = report::run(&config)?;
    let mut text = String::new();
    for s in &rep.sections {
        writeln!(text, "{:<20} {:>7} checks {:>4} failures", s.name, s.checks, s.failures).expect("string");
    }
    writeln!(text, "{}", if rep.passed { "PASS" } else { "FAIL" }).expect("string");
    let mut r = Rendered::new(text, serde_json::to_value(&rep).expect("report serializes"));
    r.holds = rep.passed;
    Ok(r)
}
