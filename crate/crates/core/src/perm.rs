//! Permutations of `{0, .., n-1}`.
//!
//! Internally everything is 0-based. Text forms (cycle and one-line notation) are 1-based,
//! matching the usual way the recursions are written down, e.g. `(1 2)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A permutation stored by its images: `self.apply(i) == self.images()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Transposition of `i` and `j` on `n` points.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Perm(images)
    }

    /// The cycle `0 -> 1 -> .. -> n-1 -> 0`.
    pub fn rotation(n: usize) -> Self {
        Perm((0..n).map(|i| (i + 1) % n).collect())
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)`; the empty string is the identity.
    pub fn from_cycles(n: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')').map(|end| (&r[..end], &r[end + 1..])));
            let Some((cycle, tail)) = inner else {
                return Err(Error::Parse(format!("bad cycle notation `{text}`")));
            };
            let points = cycle
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1 && x <= n)
                        .map(|x| x - 1)
                        .ok_or_else(|| Error::Parse(format!("bad point `{s}` in `{text}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &x in &points {
                if seen[x] {
                    return Err(Error::Parse(format!("point {} repeated in `{text}`", x + 1)));
                }
                seen[x] = true;
            }
            for (k, &x) in points.iter().enumerate() {
                images[x] = points[(k + 1) % points.len()];
            }
            rest = tail.trim_start();
        }
        Ok(Perm(images))
    }

    /// Parses 1-based one-line notation such as `2 1 3`.
    pub fn from_one_line(text: &str) -> Result<Self> {
        let images = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&x| x >= 1)
                    .map(|x| x - 1)
                    .ok_or_else(|| Error::Parse(format!("bad entry `{s}` in `{text}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(images).map_err(|_| Error::Parse(format!("`{text}` is not a permutation")))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// Extends to `n >= len` points, fixing the new ones.
    pub fn extend(&self, n: usize) -> Perm {
        let mut images = self.0.clone();
        images.extend(self.len()..n);
        Perm(images)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// 1-based cycle notation, empty for the identity.
    pub fn cycle_string(&self) -> String {
        self.cycles()
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
                format!("({})", pts.join(" "))
            })
            .collect()
    }

    /// 1-based one-line notation.
    pub fn one_line_string(&self) -> String {
        let pts: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        pts.join(" ")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "()")
        } else {
            write!(f, "{}", self.cycle_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation_round_trip() {
        let p = Perm::from_cycles(5, "(1 3 2)(4 5)").unwrap();
        assert_eq!(p.images(), &[2, 0, 1, 4, 3]);
        assert_eq!(p.cycle_string(), "(1 3 2)(4 5)");
        assert_eq!(Perm::from_cycles(5, &p.cycle_string()).unwrap(), p);
        assert!(Perm::from_cycles(3, "").unwrap().is_identity());
    }

    #[test]
    fn rejects_bad_cycles() {
        assert!(Perm::from_cycles(2, "(1 3)").is_err());
        assert!(Perm::from_cycles(3, "(1 2)(2 3)").is_err());
        assert!(Perm::from_cycles(3, "1 2").is_err());
        assert!(Perm::from_one_line("1 1").is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let a = Perm::from_cycles(3, "(1 2)").unwrap();
        let b = Perm::from_cycles(3, "(2 3)").unwrap();
        // (a ∘ b)(1) = a(b(1)) = a(1) = 2 in 1-based terms
        assert_eq!(a.compose(&b).apply(0), 1);
        assert_eq!(a.compose(&b).apply(1), 2);
        assert!(a.compose(&a.inverse()).is_identity());
    }
}
