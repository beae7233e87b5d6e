use std::collections::BTreeSet;
use std::fmt;

use crate::mealy::Word;
use crate::{Error, Result};

/// The leaves of a finite complete rooted subtree of the `d`-ary tree, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompleteTree {
    d: usize,
    leaves: Vec<Word>,
}

impl CompleteTree {
    pub fn new(d: usize, mut leaves: Vec<Word>) -> Result<Self> {
        leaves.sort();
        if d < 2 || leaves.iter().flatten().any(|&x| x >= d) || !is_complete(d, &leaves) {
            return Err(Error::InvalidInput(format!("{leaves:?} is not a complete {d}-ary tree")));
        }
        Ok(CompleteTree { d, leaves })
    }

    /// The tree with the single leaf `ε`.
    pub fn root(d: usize) -> Self {
        CompleteTree { d, leaves: vec![Vec::new()] }
    }

    /// One caret.
    pub fn caret(d: usize) -> Self {
        Self::root(d).expand(0)
    }

    /// The smallest complete tree having `u` as a leaf.
    pub fn with_leaf(d: usize, u: &[usize]) -> Self {
        let mut tree = Self::root(d);
        for i in 0..u.len() {
            let k = tree.position(&u[..i]).expect("prefix is a leaf");
            tree = tree.expand(k);
        }
        tree
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn leaves(&self) -> &[Word] {
        &self.leaves
    }

    pub fn leaf(&self, k: usize) -> &[usize] {
        &self.leaves[k]
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn carets(&self) -> usize {
        (self.len() - 1) / (self.d - 1)
    }

    pub fn depth(&self) -> usize {
        self.leaves.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Replaces leaf `k` by its `d` children, which take positions `k..k+d`.
    pub fn expand(&self, k: usize) -> Self {
        let v = &self.leaves[k];
        let children = (0..self.d).map(|x| {
            let mut w = v.clone();
            w.push(x);
            w
        });
        let mut leaves = self.leaves[..k].to_vec();
        leaves.extend(children);
        leaves.extend_from_slice(&self.leaves[k + 1..]);
        CompleteTree { d: self.d, leaves }
    }

    /// Index of the leaf equal to `v`.
    pub fn position(&self, v: &[usize]) -> Option<usize> {
        self.leaves.binary_search_by(|l| l.as_slice().cmp(v)).ok()
    }

    /// Index of the leaf that is a prefix of `w`.
    pub fn locate(&self, w: &[usize]) -> Option<usize> {
        self.leaves.iter().position(|l| w.starts_with(l))
    }

    /// Whether every vertex of `other` is a vertex of `self`.
    pub fn contains(&self, other: &CompleteTree) -> bool {
        self.d == other.d && self.leaves.iter().all(|l| other.locate(l).is_some())
    }

    /// The smallest complete tree containing both.
    pub fn union(&self, other: &CompleteTree) -> CompleteTree {
        let internal: BTreeSet<&[usize]> = self
            .leaves
            .iter()
            .chain(&other.leaves)
            .flat_map(|l| (0..l.len()).map(move |i| &l[..i]))
            .collect();
        let mut leaves = BTreeSet::new();
        for v in &internal {
            for x in 0..self.d {
                let mut w = v.to_vec();
                w.push(x);
                if !internal.contains(w.as_slice()) {
                    leaves.insert(w);
                }
            }
        }
        if leaves.is_empty() {
            return Self::root(self.d);
        }
        CompleteTree { d: self.d, leaves: leaves.into_iter().collect() }
    }

    /// Leaves separated by commas, letters 1-based (dot-separated when `d > 9`); `ε` is the root.
    pub fn to_text(&self) -> String {
        let sep = if self.d <= 9 { "" } else { "." };
        let leaf = |l: &Word| {
            if l.is_empty() {
                "ε".to_string()
            } else {
                l.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(sep)
            }
        };
        self.leaves.iter().map(leaf).collect::<Vec<_>>().join(",")
    }

    pub fn parse(d: usize, text: &str) -> Result<Self> {
        let leaf = |s: &str| -> Result<Word> {
            let s = s.trim();
            if s.is_empty() || s == "ε" {
                return Ok(Vec::new());
            }
            let tokens: Vec<&str> =
                if s.contains('.') { s.split('.').collect() } else { s.split("").filter(|t| !t.is_empty()).collect() };
            tokens
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .ok()
                        .filter(|x| (1..=d).contains(x))
                        .map(|x| x - 1)
                        .ok_or_else(|| Error::Parse(format!("bad letter `{t}` in tree `{text}`")))
                })
                .collect()
        };
        let leaves = text.split(',').map(leaf).collect::<Result<Vec<_>>>()?;
        Self::new(d, leaves).map_err(|_| Error::Parse(format!("`{text}` is not a complete tree")))
    }
}

impl fmt::Display for CompleteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn is_complete(d: usize, leaves: &[Word]) -> bool {
    fn rec(d: usize, leaves: &[&[usize]]) -> bool {
        match leaves {
            [] => false,
            [[]] => true,
            _ if leaves.iter().any(|l| l.is_empty()) => false,
            _ => (0..d).all(|x| {
                let sub: Vec<&[usize]> =
                    leaves.iter().filter(|l| l[0] == x).map(|l| &l[1..]).collect();
                rec(d, &sub)
            }),
        }
    }
    let refs: Vec<&[usize]> = leaves.iter().map(Vec::as_slice).collect();
    rec(d, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(CompleteTree::new(2, vec![vec![0], vec![1, 0], vec![1, 1]]).is_ok());
        assert!(CompleteTree::new(2, vec![vec![0], vec![1, 0]]).is_err());
        assert!(CompleteTree::new(2, vec![vec![], vec![0]]).is_err());
        assert!(CompleteTree::new(3, vec![vec![0], vec![1], vec![2, 3]]).is_err());
        assert_eq!(CompleteTree::root(3).len(), 1);
    }

    #[test]
    fn expansion_and_union() {
        let t = CompleteTree::caret(3).expand(1);
        assert_eq!(t.to_text(), "1,21,22,23,3");
        assert_eq!(t.carets(), 2);
        let u = CompleteTree::with_leaf(3, &[2, 0]);
        assert_eq!(u.to_text(), "1,2,31,32,33");
        let both = t.union(&u);
        assert_eq!(both.to_text(), "1,21,22,23,31,32,33");
        assert!(both.contains(&t) && both.contains(&u) && !t.contains(&u));
        assert_eq!(CompleteTree::root(2).union(&CompleteTree::root(2)), CompleteTree::root(2));
        assert_eq!(t.locate(&[1, 2, 0, 0]), Some(3));
        assert_eq!(t.locate(&[1]), None);
    }

    #[test]
    fn text_round_trip() {
        let t = CompleteTree::parse(2, "1, 21, 22").unwrap();
        assert_eq!(CompleteTree::parse(2, &t.to_text()).unwrap(), t);
        assert_eq!(CompleteTree::parse(2, "ε").unwrap(), CompleteTree::root(2));
        assert!(CompleteTree::parse(2, "1,21").is_err());
    }
}
