//! The oriented hypercube graph, its weightings, and restricted subgraphs.
//!
//! Edges `(S, S ∪ {i})` have a dense index `i·2^(n-1) + rank(S without bit i)`,
//! so every edge is addressable in O(1) and edge functions are flat arrays.

use crate::coalition::{apply_permutation, check_player_count, Coalition, Permutation, PlayerId};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use bitvec::vec::BitVec;
use num::{One, Signed};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// The oriented edge `(base, base ∪ {player})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub base: Coalition,
    pub player: PlayerId,
}

impl Edge {
    pub fn new(base: Coalition, player: PlayerId) -> Result<Self> {
        if base.contains(player) {
            return Err(Error::Validation(format!(
                "edge player {player} already belongs to base {base}"
            )));
        }
        Ok(Edge { base, player })
    }

    pub fn head(self) -> Coalition {
        self.base.with(self.player)
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.base, self.head())
    }
}

/// Number of edges of the full `n`-cube.
#[inline]
pub fn full_edge_count(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        n << (n - 1)
    }
}

#[inline]
pub(crate) fn edge_index(n: usize, base: Coalition, player: usize) -> usize {
    let b = base.index();
    let low = b & ((1 << player) - 1);
    let high = (b >> (player + 1)) << player;
    (player << (n - 1)) | low | high
}

#[inline]
pub(crate) fn edge_at(n: usize, index: usize) -> Edge {
    let player = index >> (n - 1);
    let rest = index & ((1 << (n - 1)) - 1);
    let low = rest & ((1 << player) - 1);
    let high = (rest >> player) << (player + 1);
    Edge {
        base: Coalition::from_bits((low | high) as u32),
        player: PlayerId(player),
    }
}

/// Positive weights on hypercube edges, in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeWeighting {
    Constant(Rational),
    /// Indexed by `|S|` of the edge's base vertex; `n` entries.
    ByCardinality(Vec<Rational>),
    /// Unlisted edges weigh 1.
    Explicit(BTreeMap<Edge, Rational>),
}

impl EdgeWeighting {
    pub fn unit() -> Self {
        EdgeWeighting::Constant(Rational::one())
    }

    /// `w(S, S ∪ {i}) = |S| + 1`.
    pub fn size_plus_one(n: usize) -> Self {
        EdgeWeighting::ByCardinality((1..=n as i64).map(Rational::from_i64).collect())
    }

    fn validate(&self, n: usize) -> Result<()> {
        let positive = |w: &Rational, what: String| {
            if w.is_positive() {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "weight {} on {what} must be strictly positive (remove the edge instead)",
                    w.render()
                )))
            }
        };
        match self {
            EdgeWeighting::Constant(c) => positive(c, "every edge".into()),
            EdgeWeighting::ByCardinality(table) => {
                if table.len() != n {
                    return Err(Error::Validation(format!(
                        "by-cardinality weighting needs {n} entries, got {}",
                        table.len()
                    )));
                }
                table
                    .iter()
                    .enumerate()
                    .try_for_each(|(k, w)| positive(w, format!("edges with |S| = {k}")))
            }
            EdgeWeighting::Explicit(map) => map.iter().try_for_each(|(e, w)| {
                if e.player.0 >= n || e.base.bits() >> n != 0 || e.base.contains(e.player) {
                    return Err(Error::Validation(format!("{e} is not an edge of the {n}-cube")));
                }
                positive(w, format!("edge {e}"))
            }),
        }
    }

    fn table<T: Scalar>(&self, n: usize) -> WeightTable<T> {
        match self {
            EdgeWeighting::Constant(c) => WeightTable::Uniform(T::from_rational(c)),
            EdgeWeighting::ByCardinality(t) => {
                WeightTable::ByCardinality(t.iter().map(T::from_rational).collect())
            }
            EdgeWeighting::Explicit(map) => {
                let mut per_edge = vec![T::one(); full_edge_count(n)];
                for (e, w) in map {
                    per_edge[edge_index(n, e.base, e.player.0)] = T::from_rational(w);
                }
                WeightTable::PerEdge(per_edge)
            }
        }
    }

    /// Exact weight of `e` under this weighting.
    pub fn weight_of(&self, e: Edge) -> Rational {
        match self {
            EdgeWeighting::Constant(c) => c.clone(),
            EdgeWeighting::ByCardinality(t) => t[e.base.len()].clone(),
            EdgeWeighting::Explicit(map) => map.get(&e).cloned().unwrap_or_else(Rational::one),
        }
    }
}

/// Edge weights converted to one scalar mode.
#[derive(Debug, Clone)]
pub enum WeightTable<T> {
    Uniform(T),
    ByCardinality(Vec<T>),
    PerEdge(Vec<T>),
}

impl<T> WeightTable<T> {
    #[inline]
    pub(crate) fn get(&self, edge: usize, base: Coalition) -> &T {
        match self {
            WeightTable::Uniform(w) => w,
            WeightTable::ByCardinality(t) => &t[base.len()],
            WeightTable::PerEdge(t) => &t[edge],
        }
    }
}

/// The hypercube graph or a connected subgraph of it containing `∅` and `N`,
/// with positive edge weights.
#[derive(Debug, Clone)]
pub struct GameGraph {
    n: usize,
    vertices: BitVec,
    edges: BitVec,
    vertex_count: usize,
    edge_count: usize,
    weighting: EdgeWeighting,
    pub(crate) weights_exact: WeightTable<Rational>,
    pub(crate) weights_float: WeightTable<f64>,
}

impl GameGraph {
    pub fn full_hypercube(n: usize, weighting: EdgeWeighting) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("a game graph needs at least one player".into()));
        }
        check_player_count(n)?;
        let vertices = BitVec::repeat(true, 1 << n);
        let edges = BitVec::repeat(true, full_edge_count(n));
        GameGraph::assemble(n, vertices, edges, weighting)
    }

    fn assemble(n: usize, vertices: BitVec, edges: BitVec, weighting: EdgeWeighting) -> Result<Self> {
        weighting.validate(n)?;
        let vertex_count = vertices.count_ones();
        let edge_count = edges.count_ones();
        let graph = GameGraph {
            n,
            vertices,
            edges,
            vertex_count,
            edge_count,
            weights_exact: weighting.table(n),
            weights_float: weighting.table(n),
            weighting,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    /// Breadth-first search from `∅` must reach every feasible vertex.
    fn check_connected(&self) -> Result<()> {
        let grand = Coalition::grand(self.n);
        for (s, what) in [(Coalition::EMPTY, "∅"), (grand, "N")] {
            if !self.contains_vertex(s) {
                return Err(Error::Infeasible {
                    coalition: s,
                    reason: format!("({what}) must be feasible"),
                });
            }
        }
        let mut seen = BitVec::<usize>::repeat(false, 1 << self.n);
        let mut queue = VecDeque::from([Coalition::EMPTY]);
        seen.set(0, true);
        let mut reached = 1;
        while let Some(s) = queue.pop_front() {
            for (t, _) in self.neighbors(s) {
                if !seen[t.index()] {
                    seen.set(t.index(), true);
                    reached += 1;
                    queue.push_back(t);
                }
            }
        }
        if reached != self.vertex_count {
            let missing = self
                .feasible_vertices()
                .find(|s| !seen[s.index()])
                .expect("some feasible vertex is unreached");
            return Err(Error::Infeasible {
                coalition: missing,
                reason: "cannot be reached from ∅ through feasible edges".into(),
            });
        }
        Ok(())
    }

    /// Removes vertices (with their incident edges) and edges, then re-validates.
    pub fn restrict(&self, removed_vertices: &[Coalition], removed_edges: &[Edge]) -> Result<Self> {
        let n = self.n;
        let grand = Coalition::grand(n);
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        for &s in removed_vertices {
            if s.bits() >> n != 0 {
                return Err(Error::Validation(format!("{s} is not a coalition of {n} players")));
            }
            if s.is_empty() || s == grand {
                return Err(Error::Validation(format!("coalition {s} (∅ or N) cannot be removed")));
            }
            vertices.set(s.index(), false);
            for j in 0..n {
                let base = s.without(PlayerId(j));
                edges.set(edge_index(n, base, j), false);
            }
        }
        for e in removed_edges {
            if e.player.0 >= n || e.base.bits() >> n != 0 || e.base.contains(e.player) {
                return Err(Error::Validation(format!("{e} is not an edge of the {n}-cube")));
            }
            edges.set(edge_index(n, e.base, e.player.0), false);
        }
        GameGraph::assemble(n, vertices, edges, self.weighting.clone())
    }

    /// Same feasible subgraph under a different weighting.
    pub fn with_weighting(&self, weighting: EdgeWeighting) -> Result<Self> {
        GameGraph::assemble(self.n, self.vertices.clone(), self.edges.clone(), weighting)
    }

    /// Reweights every feasible edge by the product of its endpoint degrees.
    pub fn degree_product_weighting(&self) -> Self {
        let map = self
            .feasible_edges()
            .map(|(_, e)| {
                let w = self.degree_unchecked(e.base) * self.degree_unchecked(e.head());
                (e, Rational::from_i64(w as i64))
            })
            .collect();
        self.with_weighting(EdgeWeighting::Explicit(map))
            .expect("degree products are positive on a connected graph")
    }

    /// The graph `σ*g`: `S` is feasible iff `σ(S)` is, with `(σ*w)(S, i) = w(σ(S), σ(i))`.
    pub fn pullback(&self, sigma: &Permutation) -> Result<Self> {
        let n = self.n;
        if sigma.len() != n {
            return Err(Error::Validation(format!(
                "permutation of {} players applied to a {n}-player graph",
                sigma.len()
            )));
        }
        let mut vertices = BitVec::repeat(false, 1 << n);
        for b in 0..1u32 << n {
            let s = Coalition::from_bits(b);
            vertices.set(s.index(), self.contains_vertex(apply_permutation(sigma, s)?));
        }
        let mut edges = BitVec::repeat(false, full_edge_count(n));
        let mut explicit = BTreeMap::new();
        for idx in 0..full_edge_count(n) {
            let e = edge_at(n, idx);
            let image = Edge {
                base: apply_permutation(sigma, e.base)?,
                player: sigma.apply(e.player),
            };
            edges.set(idx, self.contains_edge(image));
            if let EdgeWeighting::Explicit(_) = self.weighting {
                explicit.insert(e, self.weighting.weight_of(image));
            }
        }
        let weighting = match &self.weighting {
            EdgeWeighting::Explicit(_) => EdgeWeighting::Explicit(explicit),
            other => other.clone(),
        };
        GameGraph::assemble(n, vertices, edges, weighting)
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn weighting(&self) -> &EdgeWeighting {
        &self.weighting
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Whether every vertex and edge of the hypercube is feasible.
    pub fn is_full(&self) -> bool {
        self.vertex_count == 1 << self.n && self.edge_count == full_edge_count(self.n)
    }

    pub fn has_constant_weights(&self) -> bool {
        matches!(self.weighting, EdgeWeighting::Constant(_))
    }

    /// Whether feasibility and weights are invariant under every permutation
    /// of the players (checked on the generating adjacent transpositions).
    pub fn is_permutation_invariant(&self) -> bool {
        match &self.weighting {
            EdgeWeighting::Constant(_) | EdgeWeighting::ByCardinality(_) if self.is_full() => true,
            _ => (0..self.n.saturating_sub(1)).all(|j| {
                let sigma = Permutation::swap(self.n, j, j + 1).expect("in range");
                self.feasible_edges().all(|(_, e)| {
                    let image = Edge {
                        base: apply_permutation(&sigma, e.base).expect("in range"),
                        player: sigma.apply(e.player),
                    };
                    self.contains_edge(image)
                        && self.weighting.weight_of(image) == self.weighting.weight_of(e)
                }) && self.feasible_vertices().all(|s| {
                    self.contains_vertex(apply_permutation(&sigma, s).expect("in range"))
                })
            }),
        }
    }

    #[inline]
    pub fn contains_vertex(&self, s: Coalition) -> bool {
        s.bits() >> self.n == 0 && self.vertices[s.index()]
    }

    #[inline]
    pub fn contains_edge(&self, e: Edge) -> bool {
        e.player.0 < self.n
            && !e.base.contains(e.player)
            && e.base.bits() >> self.n == 0
            && self.edges[edge_index(self.n, e.base, e.player.0)]
    }

    #[inline]
    pub(crate) fn edge_feasible_at(&self, index: usize) -> bool {
        self.edges[index]
    }

    pub fn feasible_vertices(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.vertices.iter_ones().map(|b| Coalition::from_bits(b as u32))
    }

    /// Feasible edges with their dense indices, in index order.
    pub fn feasible_edges(&self) -> impl Iterator<Item = (usize, Edge)> + '_ {
        self.edges.iter_ones().map(|k| (k, edge_at(self.n, k)))
    }

    /// Neighbors of `s` through feasible edges, with the connecting edge index.
    pub fn neighbors(&self, s: Coalition) -> impl Iterator<Item = (Coalition, usize)> + '_ {
        (0..self.n).filter_map(move |j| {
            let p = PlayerId(j);
            let base = s.without(p);
            let idx = edge_index(self.n, base, j);
            self.edges[idx].then(|| (if s.contains(p) { base } else { s.with(p) }, idx))
        })
    }

    fn degree_unchecked(&self, s: Coalition) -> usize {
        self.neighbors(s).count()
    }

    /// Number of feasible edges incident to `s`.
    pub fn degree(&self, s: Coalition) -> Result<usize> {
        if !self.contains_vertex(s) {
            return Err(Error::Domain(format!("coalition {s} is not a feasible vertex")));
        }
        Ok(self.degree_unchecked(s))
    }

    /// Exact weight of a feasible edge.
    pub fn weight(&self, e: Edge) -> Option<Rational> {
        self.contains_edge(e).then(|| self.weighting.weight_of(e))
    }

    #[inline]
    pub(crate) fn weight_at<T: Scalar>(&self, edge: usize, base: Coalition) -> &T {
        T::weight_table(self).get(edge, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn c(m: &[usize]) -> Coalition {
        Coalition::from_members(m.iter().copied())
    }

    fn q3() -> GameGraph {
        GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap()
    }

    #[test]
    fn edge_indexing_is_a_bijection() {
        for n in 1..=6 {
            let mut seen = vec![false; full_edge_count(n)];
            for b in 0..1u32 << n {
                for i in 0..n {
                    let s = Coalition::from_bits(b);
                    if s.contains(PlayerId(i)) {
                        continue;
                    }
                    let k = edge_index(n, s, i);
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(edge_at(n, k), Edge { base: s, player: PlayerId(i) });
                }
            }
            assert!(seen.into_iter().all(|x| x));
        }
    }

    #[test]
    fn full_hypercube_counts() {
        let g = q3();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 12));
        let g1 = GameGraph::full_hypercube(1, EdgeWeighting::unit()).unwrap();
        assert_eq!((g1.vertex_count(), g1.edge_count()), (2, 1));
        let g4 = GameGraph::full_hypercube(4, EdgeWeighting::unit()).unwrap();
        assert_eq!(g4.edge_count(), 32);
        for s in g4.feasible_vertices() {
            assert_eq!(g4.degree(s).unwrap(), 4);
        }
        assert!(GameGraph::full_hypercube(0, EdgeWeighting::unit()).is_err());
    }

    #[test]
    fn restriction_counts_and_degrees() {
        let g = q3();
        let r = g.restrict(&[c(&[0])], &[]).unwrap();
        assert_eq!((r.vertex_count(), r.edge_count()), (7, 9));
        let unchanged = g.restrict(&[], &[]).unwrap();
        assert_eq!(unchanged.edge_count(), 12);
        assert!(unchanged.is_full());

        let minus1 = g.restrict(&[c(&[1])], &[]).unwrap();
        assert_eq!(minus1.degree(Coalition::EMPTY).unwrap(), 2);
        assert_eq!(minus1.degree(c(&[0, 1])).unwrap(), 2);
        assert!(matches!(minus1.degree(c(&[1])), Err(Error::Domain(_))));
        // no edge references an infeasible endpoint
        for (_, e) in minus1.feasible_edges() {
            assert!(minus1.contains_vertex(e.base) && minus1.contains_vertex(e.head()));
        }
    }

    #[test]
    fn restriction_errors() {
        let g = q3();
        let err = g.restrict(&[c(&[0]), c(&[1]), c(&[2])], &[]).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        assert!(matches!(g.restrict(&[Coalition::EMPTY], &[]), Err(Error::Validation(_))));
        assert!(matches!(g.restrict(&[c(&[0, 1, 2])], &[]), Err(Error::Validation(_))));
        // cutting every edge into N isolates it
        let into_n: Vec<Edge> = (0..3)
            .map(|i| Edge::new(c(&[0, 1, 2]).without(PlayerId(i)), PlayerId(i)).unwrap())
            .collect();
        match g.restrict(&[], &into_n).unwrap_err() {
            Error::Infeasible { coalition, .. } => assert_eq!(coalition, c(&[0, 1, 2])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degree_products() {
        let full = q3().degree_product_weighting();
        for (_, e) in full.feasible_edges() {
            assert_eq!(full.weight(e).unwrap(), rational(9, 1));
        }
        let minus1 = q3().restrict(&[c(&[1])], &[]).unwrap().degree_product_weighting();
        let e = Edge::new(Coalition::EMPTY, PlayerId(2)).unwrap();
        assert_eq!(minus1.weight(e).unwrap(), rational(6, 1));
        let distinct: std::collections::BTreeSet<_> =
            minus1.feasible_edges().map(|(_, e)| minus1.weight(e).unwrap()).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(GameGraph::full_hypercube(2, EdgeWeighting::Constant(rational(0, 1))).is_err());
        let bad = EdgeWeighting::ByCardinality(vec![rational(1, 1)]);
        assert!(GameGraph::full_hypercube(2, bad).is_err());
        let mut map = BTreeMap::new();
        map.insert(Edge::new(Coalition::EMPTY, PlayerId(0)).unwrap(), rational(-1, 2));
        assert!(GameGraph::full_hypercube(2, EdgeWeighting::Explicit(map)).is_err());
    }

    #[test]
    fn symmetry_detection() {
        assert!(q3().is_permutation_invariant());
        let sized = GameGraph::full_hypercube(3, EdgeWeighting::size_plus_one(3)).unwrap();
        assert!(sized.is_permutation_invariant());
        assert!(sized.degree_product_weighting().is_permutation_invariant());
        let minus1 = q3().restrict(&[c(&[1])], &[]).unwrap();
        assert!(!minus1.is_permutation_invariant());
        let mut map = BTreeMap::new();
        map.insert(Edge::new(Coalition::EMPTY, PlayerId(0)).unwrap(), rational(1, 2));
        let reluctant = GameGraph::full_hypercube(3, EdgeWeighting::Explicit(map)).unwrap();
        assert!(!reluctant.is_permutation_invariant());
    }

    #[test]
    fn pullback_moves_holes() {
        let minus1 = q3().restrict(&[c(&[1])], &[]).unwrap();
        let sigma = Permutation::swap(3, 0, 1).unwrap();
        let moved = minus1.pullback(&sigma).unwrap();
        assert!(!moved.contains_vertex(c(&[0])));
        assert!(moved.contains_vertex(c(&[1])));
        assert_eq!(moved.edge_count(), 9);
    }
}
