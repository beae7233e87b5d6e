//! Text forms: state definitions (`b = (a, c)`, `a = (1 2)(e, e)`), words and DOT export.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Automaton, StateId, Word};
use crate::perm::Perm;
use crate::{Error, Result};

/// Parses a 1-based word: `122`, `1 2 2` or `1,2,2`; `ε` or the empty string is the root.
pub fn parse_word(d: usize, text: &str) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() || text == "ε" || text == "-" {
        return Ok(Vec::new());
    }
    let tokens: Vec<&str> = if text.contains([' ', ',']) {
        text.split([' ', ',']).filter(|s| !s.is_empty()).collect()
    } else {
        text.split("").filter(|s| !s.is_empty()).collect()
    };
    tokens
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .ok()
                .filter(|&x| (1..=d).contains(&x))
                .map(|x| x - 1)
                .ok_or_else(|| Error::Parse(format!("bad letter `{t}` in word `{text}`")))
        })
        .collect()
}

/// 1-based text form of a word; letters are concatenated when `d ≤ 9`.
pub fn format_word(d: usize, w: &[usize]) -> String {
    if w.is_empty() {
        return "ε".to_string();
    }
    let letters: Vec<String> = w.iter().map(|x| (x + 1).to_string()).collect();
    letters.join(if d <= 9 { "" } else { "," })
}

struct Line<'a> {
    name: &'a str,
    perm: &'a str,
    children: Vec<&'a str>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(|c: char| c.is_whitespace() || "(),=".contains(c))
}

fn parse_line(line: &str) -> Result<Line<'_>> {
    let bad = |why: &str| Error::Parse(format!("{why} in definition `{line}`"));
    let (name, rhs) = line.split_once('=').ok_or_else(|| bad("missing `=`"))?;
    let name = name.trim();
    if !valid_name(name) {
        return Err(bad("invalid state name"));
    }
    let rhs = rhs.trim();
    let open = rhs.rfind('(').ok_or_else(|| bad("missing child list"))?;
    let inner = rhs[open + 1..].strip_suffix(')').ok_or_else(|| bad("child list must end the line"))?;
    let children: Vec<&str> = inner.split(',').map(str::trim).collect();
    if children.iter().any(|c| !valid_name(c)) {
        return Err(bad("invalid child name"));
    }
    Ok(Line { name, perm: rhs[..open].trim(), children })
}

impl Automaton {
    /// Builds an automaton from definition lines. The alphabet size is the number of
    /// children on each line; `e` is the identity.
    pub fn from_definitions(text: &str) -> Result<Self> {
        let d = text
            .lines()
            .map(strip_comment)
            .find(|l| !l.is_empty())
            .map(|l| parse_line(l).map(|line| line.children.len()))
            .transpose()?
            .ok_or_else(|| Error::Parse("no state definitions".into()))?;
        if d < 2 {
            return Err(Error::Parse("alphabet must have at least two letters".into()));
        }
        let mut aut = Automaton::new(d);
        aut.add_definitions(text)?;
        Ok(aut)
    }

    /// Adds definition lines; children may refer to states defined in the same text or
    /// already named in the automaton. Returns the ids of the defined names, in order.
    pub fn add_definitions(&mut self, text: &str) -> Result<Vec<(String, StateId)>> {
        let lines: Vec<Line> = text
            .lines()
            .map(strip_comment)
            .filter(|l| !l.is_empty())
            .map(parse_line)
            .collect::<Result<_>>()?;
        let mut local: HashMap<&str, usize> = HashMap::new();
        for (i, line) in lines.iter().enumerate() {
            if line.name == "e" {
                return Err(Error::Parse("`e` is reserved for the identity".into()));
            }
            if local.insert(line.name, i).is_some() {
                return Err(Error::Parse(format!("state `{}` defined twice", line.name)));
            }
        }
        // rows: one per line, then one per referenced existing state
        let mut rows: Vec<(Perm, Vec<usize>)> = Vec::with_capacity(lines.len());
        let mut extern_rows: HashMap<StateId, usize> = HashMap::new();
        let mut externs: Vec<StateId> = Vec::new();
        for line in &lines {
            if line.children.len() != self.d {
                return Err(Error::Parse(format!(
                    "state `{}` has {} children, expected {}",
                    line.name,
                    line.children.len(),
                    self.d
                )));
            }
            let perm = Perm::from_cycles(self.d, line.perm)?;
            let mut children = Vec::with_capacity(self.d);
            for &c in &line.children {
                let row = match local.get(c) {
                    Some(&i) => i,
                    None => {
                        let id = self
                            .lookup(c)
                            .ok_or_else(|| Error::Parse(format!("unknown state `{c}`")))?;
                        *extern_rows.entry(id).or_insert_with(|| {
                            externs.push(id);
                            lines.len() + externs.len() - 1
                        })
                    }
                };
                children.push(row);
            }
            rows.push((perm, children));
        }
        // existing states enter as copies of themselves; they merge straight back
        let mut i = 0;
        while i < externs.len() {
            let id = externs[i];
            let perm = self.perm(id).clone();
            let mut children = Vec::with_capacity(self.d);
            for &c in self.children(id) {
                let row = *extern_rows.entry(c).or_insert_with(|| {
                    externs.push(c);
                    lines.len() + externs.len() - 1
                });
                children.push(row);
            }
            rows.push((perm, children));
            i += 1;
        }
        let ids = self.add_rows(&rows)?;
        let mut out = Vec::with_capacity(lines.len());
        for (line, &id) in lines.iter().zip(&ids) {
            self.set_name(id, line.name);
            out.push((line.name.to_string(), id));
        }
        Ok(out)
    }

    /// Definition lines for the states reachable from `roots`, in the input syntax.
    pub fn definitions(&self, roots: &[StateId]) -> String {
        let mut out = String::new();
        for g in self.reachable(roots) {
            if g == 0 {
                continue;
            }
            let perm = self.perm(g).cycle_string();
            let children: Vec<String> = self.children(g).iter().map(|&c| self.name(c)).collect();
            writeln!(out, "{} = {}({})", self.name(g), perm, children.join(", ")).unwrap();
        }
        out
    }

    /// DOT graph of the states reachable from `roots`, edges labelled `x|ρ(x)`.
    pub fn to_dot(&self, roots: &[StateId]) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        let states = self.reachable(roots);
        for &g in &states {
            writeln!(out, "  \"{}\";", self.name(g)).unwrap();
        }
        for &g in &states {
            for x in 0..self.d {
                let target = self.child(g, x);
                let y = self.perm(g).apply(x);
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}|{}\"];",
                    self.name(g),
                    self.name(target),
                    x + 1,
                    y + 1
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        assert_eq!(parse_word(2, "122").unwrap(), vec![0, 1, 1]);
        assert_eq!(parse_word(3, "1, 3").unwrap(), vec![0, 2]);
        assert_eq!(parse_word(2, "ε").unwrap(), Vec::<usize>::new());
        assert!(parse_word(2, "13").is_err());
        assert_eq!(format_word(2, &[0, 1, 1]), "122");
        assert_eq!(format_word(12, &[10, 0]), "11,1");
    }

    #[test]
    fn definitions_round_trip() {
        let text = "a = (1 2)(e, e, a)\nb = (a, c, b)\nc = (a, d, c)\nd = (e, b, d)\n";
        let aut = Automaton::from_definitions(text).unwrap();
        assert_eq!(aut.d(), 3);
        let roots: Vec<StateId> = ["a", "b", "c", "d"].iter().map(|n| aut.lookup(n).unwrap()).collect();
        let again = Automaton::from_definitions(&aut.definitions(&roots)).unwrap();
        assert_eq!(again.len(), aut.len());
        for n in ["a", "b", "c", "d"] {
            let (x, y) = (aut.lookup(n).unwrap(), again.lookup(n).unwrap());
            assert_eq!(aut.perm(x), again.perm(y));
        }
    }

    #[test]
    fn incremental_definitions_reuse_names() {
        let mut aut = Automaton::from_definitions("a = (1 2)(e, e)").unwrap();
        let added = aut.add_definitions("f = (a, f)").unwrap();
        assert_eq!(added.len(), 1);
        assert_eq!(aut.child(added[0].1, 0), aut.lookup("a").unwrap());
        assert!(aut.add_definitions("g = (h, e)").is_err());
        assert!(aut.add_definitions("g = (e, e, e)").is_err());
    }

    #[test]
    fn dot_labels() {
        let aut = Automaton::from_definitions("a = (1 2)(e, e)").unwrap();
        let dot = aut.to_dot(&[aut.lookup("a").unwrap()]);
        assert!(dot.contains("\"a\" -> \"e\" [label=\"1|2\"]"));
        assert!(dot.contains("\"e\" -> \"e\" [label=\"2|2\"]"));
    }
}
