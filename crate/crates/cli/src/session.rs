//! Definition files: TOML with `field`, `context`, `automaton`, `agl` and `rover` tables.
//! Section names share one namespace, so `--cmd states grig` never needs a qualifier.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use selfsim::agl::{self, Agl1Element};
use selfsim::ff_poly::{parse_rational, Place, PlaceSet};
use selfsim::mealy::{Automaton, StateId};
use selfsim::rover::{RoverElement, RoverGroup};
use selfsim::series::CompletionContext;
use selfsim::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefsFile {
    #[serde(default)]
    field: BTreeMap<String, FieldDef>,
    #[serde(default)]
    context: BTreeMap<String, ContextDef>,
    #[serde(default)]
    automaton: BTreeMap<String, AutomatonDef>,
    #[serde(default)]
    agl: BTreeMap<String, AglDef>,
    #[serde(default)]
    rover: BTreeMap<String, RoverDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDef {
    p: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextDef {
    field: Option<String>,
    p: Option<u32>,
    s: String,
    pi: String,
    places: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDef {
    definitions: String,
    generators: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AglDef {
    context: String,
    generators: Vec<(String, String)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoverDef {
    group: String,
    #[serde(default)]
    persist: bool,
    #[serde(default)]
    elements: BTreeMap<String, String>,
}

/// A group of tree automorphisms given by generators in an automaton.
#[derive(Debug, Clone)]
pub struct Group {
    pub automaton: Automaton,
    pub generators: Vec<StateId>,
    pub context: Option<CompletionContext>,
    pub elements: HashMap<StateId, Agl1Element>,
}

#[derive(Debug, Clone)]
pub struct RoverSection {
    pub group: String,
    pub persist: bool,
    pub elements: BTreeMap<String, String>,
}

#[derive(Debug, Default)]
pub struct Session {
    pub contexts: BTreeMap<String, CompletionContext>,
    pub groups: BTreeMap<String, Group>,
    pub rovers: BTreeMap<String, RoverSection>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl Session {
    pub fn parse(text: &str, max_states: usize) -> Result<Self> {
        let file: DefsFile = toml::from_str(text).map_err(parse_err)?;
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        let sections = [
            ("field", file.field.keys().collect::<Vec<_>>()),
            ("context", file.context.keys().collect()),
            ("automaton", file.automaton.keys().collect()),
            ("agl", file.agl.keys().collect()),
            ("rover", file.rover.keys().collect()),
        ];
        for (kind, names) in &sections {
            for name in names {
                if let Some(other) = seen.insert(name.as_str(), kind) {
                    return Err(Error::Parse(format!("`{name}` is declared as both {other} and {kind}")));
                }
            }
        }
        let mut element_names: BTreeMap<&str, &str> = BTreeMap::new();
        for (rover, def) in &file.rover {
            for name in def.elements.keys() {
                if seen.contains_key(name.as_str()) || element_names.insert(name, rover).is_some() {
                    return Err(Error::Parse(format!("element name `{name}` is not unique")));
                }
            }
        }

        let mut session = Session::default();
        for (name, def) in &file.context {
            let p = match (&def.field, def.p) {
                (Some(f), None) => file
                    .field
                    .get(f)
                    .map(|f| f.p)
                    .ok_or_else(|| Error::Parse(format!("context `{name}`: unknown field `{f}`")))?,
                (None, Some(p)) => p,
                _ => return Err(Error::Parse(format!("context `{name}` needs exactly one of `field`, `p`"))),
            };
            let places = def.places.iter().map(|s| Place::parse(p, s)).collect::<Result<Vec<_>>>()?;
            let ctx = CompletionContext::new(
                p,
                Place::parse(p, &def.s)?,
                PlaceSet::new(places)?,
                parse_rational(p, &def.pi)?,
            )?;
            session.contexts.insert(name.clone(), ctx);
        }
        for (name, def) in &file.automaton {
            let aut = Automaton::from_definitions(&def.definitions)?;
            let generators = match &def.generators {
                Some(names) => names
                    .iter()
                    .map(|g| aut.lookup(g).ok_or_else(|| Error::Parse(format!("`{name}`: unknown generator `{g}`"))))
                    .collect::<Result<Vec<_>>>()?,
                None => {
                    let mut defined: Vec<StateId> =
                        aut.named_states().into_iter().filter(|(n, _)| n != "e").map(|(_, g)| g).collect();
                    defined.dedup();
                    defined
                }
            };
            let group = Group { automaton: aut, generators, context: None, elements: HashMap::new() };
            session.groups.insert(name.clone(), group);
        }
        for (name, def) in &file.agl {
            let ctx = session
                .contexts
                .get(&def.context)
                .ok_or_else(|| Error::Parse(format!("agl `{name}`: unknown context `{}`", def.context)))?
                .clone();
            let gens = def
                .generators
                .iter()
                .map(|(_, g)| Agl1Element::parse(&ctx, g))
                .collect::<Result<Vec<_>>>()?;
            let names: Vec<&str> = def.generators.iter().map(|(n, _)| n.as_str()).collect();
            let comp = agl::compile(&ctx, &gens, &names, max_states)?;
            let elements = comp.states().into_iter().map(|g| (g, comp.element(g).expect("compiled").clone())).collect();
            let group = Group {
                automaton: comp.automaton,
                generators: comp.generators,
                context: Some(ctx),
                elements,
            };
            session.groups.insert(name.clone(), group);
        }
        for (name, def) in file.rover {
            if !session.groups.contains_key(&def.group) {
                return Err(Error::Parse(format!("rover `{name}`: unknown group `{}`", def.group)));
            }
            session.rovers.insert(name, RoverSection { group: def.group, persist: def.persist, elements: def.elements });
        }
        Ok(session)
    }

    pub fn group(&self, name: &str) -> Result<&Group> {
        self.groups.get(name).ok_or_else(|| Error::Parse(format!("unknown group `{name}`")))
    }

    /// The rover group of a section, with the section's named elements parsed.
    pub fn rover(&self, name: &str, max_states: usize) -> Result<(RoverGroup, BTreeMap<String, RoverElement>)> {
        let section = self.rovers.get(name).ok_or_else(|| Error::Parse(format!("unknown rover section `{name}`")))?;
        let group = self.group(&section.group)?;
        let aut = if section.persist { group.automaton.persist_extend() } else { group.automaton.clone() };
        let mut rover = RoverGroup::new(aut, group.generators.clone(), max_states)?;
        if let Some(ctx) = &group.context {
            rover = rover.with_context(ctx.clone());
        }
        let elements = section
            .elements
            .iter()
            .map(|(n, text)| Ok((n.clone(), rover.parse(text)?)))
            .collect::<Result<_>>()?;
        Ok((rover, elements))
    }
}
