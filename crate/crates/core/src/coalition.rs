//! Coalitions as bitsets over at most [`MAX_PLAYERS`] players.
//!
//! The integer value of a coalition's bitset is its vertex index in the
//! hypercube graph; every file format and solver uses this numbering.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Hard cap on the number of players. Bounds the vertex count at `2^24`.
pub const MAX_PLAYERS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub usize);

impl PlayerId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for PlayerId {
    fn from(i: usize) -> Self {
        PlayerId(i)
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of the player set, stored as a bitset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coalition(u32);

/// Serialized as the sorted member-list string, e.g. `"[1,3]"`.
impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coalition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        Coalition(bits)
    }

    /// The grand coalition `N` on `n` players.
    #[inline]
    pub fn grand(n: usize) -> Self {
        debug_assert!(n <= MAX_PLAYERS);
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(player: PlayerId) -> Self {
        Coalition(1 << player.0)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        members
            .into_iter()
            .fold(Coalition::EMPTY, |c, i| c.with(PlayerId(i)))
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Vertex index in the hypercube graph.
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, player: PlayerId) -> bool {
        self.0 >> player.0 & 1 == 1
    }

    #[inline]
    #[must_use]
    pub fn with(self, player: PlayerId) -> Self {
        Coalition(self.0 | 1 << player.0)
    }

    #[inline]
    #[must_use]
    pub fn without(self, player: PlayerId) -> Self {
        Coalition(self.0 & !(1 << player.0))
    }

    #[inline]
    #[must_use]
    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    #[inline]
    #[must_use]
    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    #[inline]
    #[must_use]
    pub fn symmetric_difference(self, other: Coalition) -> Self {
        Coalition(self.0 ^ other.0)
    }

    #[inline]
    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order.
    pub fn members(self) -> impl Iterator<Item = PlayerId> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(PlayerId(i))
            }
        })
    }

    /// Renders with a display name per player, e.g. `{1,3}`.
    pub fn display_with(self, names: &[String]) -> String {
        let parts: Vec<&str> = self
            .members()
            .map(|p| names.get(p.0).map_or("?", String::as_str))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Sorted member list, e.g. `[1,3]`; the empty coalition is `[]`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p.0)?;
        }
        f.write_str("]")
    }
}

impl FromStr for Coalition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Validation(format!("coalition `{s}` must look like [0,2]")))?;
        let mut c = Coalition::EMPTY;
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let i: usize = tok
                .parse()
                .map_err(|_| Error::Validation(format!("bad player index `{tok}` in `{s}`")))?;
            if i >= MAX_PLAYERS {
                return Err(Error::Capacity {
                    what: "player index",
                    got: i,
                    limit: MAX_PLAYERS - 1,
                });
            }
            if c.contains(PlayerId(i)) {
                return Err(Error::Validation(format!("duplicate player {i} in `{s}`")));
            }
            c = c.with(PlayerId(i));
        }
        Ok(c)
    }
}

pub(crate) fn check_player_count(n: usize) -> Result<()> {
    if n > MAX_PLAYERS {
        return Err(Error::Capacity {
            what: "player count",
            got: n,
            limit: MAX_PLAYERS,
        });
    }
    Ok(())
}

/// All `2^n` coalitions in ascending bitset order.
pub fn enumerate_coalitions(n: usize) -> Result<impl ExactSizeIterator<Item = Coalition>> {
    check_player_count(n)?;
    Ok((0..1u32 << n).map(Coalition))
}

/// Hamming distance `|S △ T|` in the hypercube graph.
#[inline]
pub fn distance(s: Coalition, t: Coalition) -> usize {
    s.symmetric_difference(t).len()
}

/// A bijection on `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        check_player_count(map.len())?;
        let mut seen = vec![false; map.len()];
        for &j in &map {
            if j >= map.len() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Validation(format!(
                    "{map:?} is not a permutation of 0..{}",
                    map.len()
                )));
            }
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// The transposition of players `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::Validation(format!("swap({a},{b}) out of range for n={n}")));
        }
        map.swap(a, b);
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, player: PlayerId) -> PlayerId {
        PlayerId(self.map[player.0])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Validation("composing permutations of different sizes".into()));
        }
        Ok(Permutation {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (j, &k) in self.map.iter().enumerate() {
            inv[k] = j;
        }
        Permutation { map: inv }
    }

    /// All `n!` permutations of `n` players, in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(
            n: usize,
            current: &mut Vec<usize>,
            used: &mut [bool],
            out: &mut Vec<Permutation>,
        ) {
            if current.len() == n {
                out.push(Permutation {
                    map: current.clone(),
                });
                return;
            }
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    current.push(j);
                    rec(n, current, used, out);
                    current.pop();
                    used[j] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

/// `σ(S) = { σ(j) : j ∈ S }`.
pub fn apply_permutation(sigma: &Permutation, s: Coalition) -> Result<Coalition> {
    if let Some(top) = s.members().last() {
        if top.0 >= sigma.len() {
            return Err(Error::Validation(format!(
                "coalition {s} references players outside a permutation of size {}",
                sigma.len()
            )));
        }
    }
    Ok(s.members()
        .fold(Coalition::EMPTY, |acc, j| acc.with(sigma.apply(j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: &[usize]) -> Coalition {
        Coalition::from_members(m.iter().copied())
    }

    #[test]
    fn enumeration_order() {
        let v: Vec<_> = enumerate_coalitions(0).unwrap().collect();
        assert_eq!(v, vec![Coalition::EMPTY]);
        let v: Vec<_> = enumerate_coalitions(2).unwrap().collect();
        assert_eq!(v, vec![c(&[]), c(&[0]), c(&[1]), c(&[0, 1])]);
        assert_eq!(enumerate_coalitions(3).unwrap().len(), 8);
        for (k, s) in enumerate_coalitions(4).unwrap().enumerate() {
            assert_eq!(s.index(), k);
        }
        assert!(matches!(
            enumerate_coalitions(MAX_PLAYERS + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn distances() {
        assert_eq!(distance(c(&[]), c(&[])), 0);
        assert_eq!(distance(c(&[1, 2]), c(&[2, 3])), 2);
        // N \ {i} against T ⊂ N \ {i}
        let n = 5;
        let i = PlayerId(2);
        let s = Coalition::grand(n).without(i);
        for t in enumerate_coalitions(n).unwrap().filter(|t| !t.contains(i)) {
            assert_eq!(distance(s, t), n - t.len() - 1);
        }
    }

    #[test]
    fn distance_is_a_metric_exhaustively() {
        let all: Vec<_> = enumerate_coalitions(4).unwrap().collect();
        for &s in &all {
            for &t in &all {
                assert_eq!(distance(s, t), distance(t, s));
                assert_eq!(distance(s, t) == 0, s == t);
                for &u in &all {
                    assert!(distance(s, u) <= distance(s, t) + distance(t, u));
                }
            }
        }
    }

    #[test]
    fn permutation_action() {
        let id = Permutation::identity(3);
        for s in enumerate_coalitions(3).unwrap() {
            assert_eq!(apply_permutation(&id, s).unwrap(), s);
        }
        // swap(2,3) in 1-based labels is swap(1,2) here; {1,2} ↦ {1,3} likewise
        let sw = Permutation::swap(4, 2, 3).unwrap();
        assert_eq!(apply_permutation(&sw, c(&[1, 2])).unwrap(), c(&[1, 3]));
        for s in enumerate_coalitions(4).unwrap() {
            let once = apply_permutation(&sw, s).unwrap();
            assert_eq!(apply_permutation(&sw, once).unwrap(), s);
            assert_eq!(once.len(), s.len());
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn parse_and_display() {
        let s: Coalition = "[3, 1]".parse().unwrap();
        assert_eq!(s, c(&[1, 3]));
        assert_eq!(s.to_string(), "[1,3]");
        assert_eq!("[]".parse::<Coalition>().unwrap(), Coalition::EMPTY);
        assert!("[1,1]".parse::<Coalition>().is_err());
        assert!("1,2".parse::<Coalition>().is_err());
        let names = vec!["1".to_string(), "2".to_string(), "3".to_string()];
        assert_eq!(c(&[0, 2]).display_with(&names), "{1,3}");
    }

    #[test]
    fn compose_and_inverse() {
        let a = Permutation::new(vec![1, 2, 0]).unwrap();
        let b = Permutation::new(vec![0, 2, 1]).unwrap();
        let ab = a.compose(&b).unwrap();
        for j in 0..3 {
            assert_eq!(ab.apply(PlayerId(j)), a.apply(b.apply(PlayerId(j))));
        }
        assert_eq!(a.compose(&a.inverse()).unwrap(), Permutation::identity(3));
    }
}
