//! Eventually periodic boundary points `pre · per^ω` of the tree and their images.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{format_word, parse_word, Automaton, StateId, Word};
use crate::periodic;
use crate::{Error, Result};

/// An eventually periodic infinite word, stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pre: Word,
    per: Word,
}

impl BoundaryPoint {
    pub fn new(pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::InvalidInput("period must be non-empty".into()));
        }
        let (pre, per) = periodic::canonicalize(pre, per);
        Ok(BoundaryPoint { pre, per })
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.pre
    }

    pub fn period(&self) -> &[usize] {
        &self.per
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| periodic::nth(&self.pre, &self.per, i)).collect()
    }

    pub fn letter(&self, i: usize) -> usize {
        periodic::nth(&self.pre, &self.per, i)
    }

    /// The point with its first `k` letters removed.
    pub fn suffix(&self, k: usize) -> BoundaryPoint {
        let (pre, per) = periodic::suffix(&self.pre, &self.per, k);
        BoundaryPoint::new(pre, per).expect("period stays non-empty")
    }

    /// `u · self`.
    pub fn prepend(&self, u: &[usize]) -> BoundaryPoint {
        let mut pre = u.to_vec();
        pre.extend_from_slice(&self.pre);
        BoundaryPoint::new(pre, self.per.clone()).expect("period stays non-empty")
    }

    /// Text form `pre|per` with 1-based letters, e.g. `12|1`.
    pub fn to_text(&self, d: usize) -> String {
        let pre = if self.pre.is_empty() { String::new() } else { format_word(d, &self.pre) };
        format!("{}|{}", pre, format_word(d, &self.per))
    }

    pub fn parse(d: usize, text: &str) -> Result<Self> {
        let (pre, per) = text
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("boundary point `{text}` needs `|`")))?;
        let per = parse_word(d, per)?;
        if per.is_empty() {
            return Err(Error::Parse(format!("boundary point `{text}` has an empty period")));
        }
        BoundaryPoint::new(parse_word(d, pre)?, per)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "({} | {})", w(&self.pre), w(&self.per))
    }
}

impl Automaton {
    /// Image of a boundary point. The state at the start of each pass through the period
    /// eventually repeats; the output between two occurrences is the output period.
    pub fn act_boundary(&self, g: StateId, x: &BoundaryPoint) -> BoundaryPoint {
        let mut state = g;
        let mut out = Vec::new();
        for &a in &x.pre {
            out.push(self.perm(state).apply(a));
            state = self.child(state, a);
        }
        let mut seen: HashMap<StateId, usize> = HashMap::new();
        loop {
            if let Some(&start) = seen.get(&state) {
                let per = out.split_off(start);
                return BoundaryPoint::new(out, per).expect("a full pass was recorded");
            }
            seen.insert(state, out.len());
            for &a in &x.per {
                out.push(self.perm(state).apply(a));
                state = self.child(state, a);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_action_matches_prefixes() {
        let aut = Automaton::from_definitions(
            "a = (1 2)(e, e)\nb = (a, c)\nc = (a, d)\nd = (e, b)",
        )
        .unwrap();
        let x = BoundaryPoint::new(vec![1], vec![0]).unwrap();
        for g in 0..aut.len() {
            let y = aut.act_boundary(g, &x);
            assert_eq!(y.prefix(40), aut.act(g, &x.prefix(40)));
        }
        let b = aut.lookup("b").unwrap();
        let y = aut.act_boundary(b, &BoundaryPoint::new(vec![], vec![0]).unwrap());
        assert_eq!(y.prefix(6), vec![0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn text_form() {
        let x = BoundaryPoint::parse(2, "12|212").unwrap();
        assert_eq!(x.to_text(2), "|122");
        assert_eq!(BoundaryPoint::parse(3, "|3").unwrap().period(), &[2]);
        assert!(BoundaryPoint::parse(2, "12|").is_err());
        assert_eq!(x.suffix(3).prepend(&[0, 1, 1]), x);
    }
}
