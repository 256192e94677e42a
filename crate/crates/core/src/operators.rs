//! Matrix-free discrete calculus on a [`GameGraph`].
//!
//! `d` maps vertex functions to edge functions by differencing along each
//! oriented edge; `d*_w` is its adjoint for the weighted edge inner product;
//! `L_w = d*_w d` is the weighted graph Laplacian. Edge values are stored only
//! in the canonical orientation `(S, S ∪ {i})`. Reversal is a sign applied in
//! `d_star`, nowhere else.
//!
//! Values at infeasible vertices and edges are kept at zero and never read.

use crate::coalition::{Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::{edge_index, full_edge_count, GameGraph};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct VertexFunction<'g, T> {
    graph: &'g GameGraph,
    values: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct EdgeFunction<'g, T> {
    graph: &'g GameGraph,
    values: Vec<T>,
}

impl<'g, T: Scalar> VertexFunction<'g, T> {
    /// Takes a value table indexed by coalition; entries at infeasible vertices are dropped.
    pub fn new(graph: &'g GameGraph, mut values: Vec<T>) -> Result<Self> {
        if values.len() != 1 << graph.players() {
            return Err(Error::Domain(format!(
                "vertex function needs {} values, got {}",
                1usize << graph.players(),
                values.len()
            )));
        }
        if graph.vertex_count() != values.len() {
            for (k, x) in values.iter_mut().enumerate() {
                if !graph.contains_vertex(Coalition::from_bits(k as u32)) {
                    *x = T::zero();
                }
            }
        }
        Ok(VertexFunction { graph, values })
    }

    pub fn from_game(graph: &'g GameGraph, game: &Game<T>) -> Result<Self> {
        if game.players() != graph.players() {
            return Err(Error::Domain(format!(
                "{}-player game on a {}-player graph",
                game.players(),
                graph.players()
            )));
        }
        VertexFunction::new(graph, game.values().to_vec())
    }

    pub fn from_fn(graph: &'g GameGraph, f: impl Fn(Coalition) -> T) -> Self {
        let values = (0..1u32 << graph.players())
            .map(|b| {
                let s = Coalition::from_bits(b);
                if graph.contains_vertex(s) {
                    f(s)
                } else {
                    T::zero()
                }
            })
            .collect();
        VertexFunction { graph, values }
    }

    pub fn graph(&self) -> &'g GameGraph {
        self.graph
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn at(&self, s: Coalition) -> &T {
        &self.values[s.index()]
    }

    /// `Σ_S u(S) v(S)` over feasible vertices.
    pub fn inner(&self, other: &VertexFunction<'_, T>) -> Result<T> {
        same_graph(self.graph, other.graph)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.clone() * b.clone())
            .sum())
    }
}

impl<'g, T: Scalar> EdgeFunction<'g, T> {
    pub fn zeros(graph: &'g GameGraph) -> Self {
        EdgeFunction {
            graph,
            values: vec![T::zero(); full_edge_count(graph.players())],
        }
    }

    pub fn from_fn(graph: &'g GameGraph, f: impl Fn(crate::graph::Edge) -> T) -> Self {
        let mut out = EdgeFunction::zeros(graph);
        for (k, e) in graph.feasible_edges() {
            out.values[k] = f(e);
        }
        out
    }

    /// Indicator of one feasible edge.
    pub fn indicator(graph: &'g GameGraph, base: Coalition, player: PlayerId) -> Result<Self> {
        let e = crate::graph::Edge::new(base, player)?;
        if !graph.contains_edge(e) {
            return Err(Error::Domain(format!("{e} is not a feasible edge")));
        }
        let mut out = EdgeFunction::zeros(graph);
        out.values[edge_index(graph.players(), base, player.0)] = T::one();
        Ok(out)
    }

    pub fn graph(&self) -> &'g GameGraph {
        self.graph
    }

    /// Value on the canonically oriented edge `(base, base ∪ {player})`.
    pub fn at(&self, base: Coalition, player: PlayerId) -> &T {
        &self.values[edge_index(self.graph.players(), base, player.0)]
    }

    /// Raw values in dense edge-index order (zeros on infeasible edges).
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|x| x.is_zero())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    #[must_use]
    pub fn sub(&self, other: &EdgeFunction<'_, T>) -> Self {
        EdgeFunction {
            graph: self.graph,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    #[must_use]
    pub fn add(&self, other: &EdgeFunction<'_, T>) -> Self {
        EdgeFunction {
            graph: self.graph,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

fn same_graph(a: &GameGraph, b: &GameGraph) -> Result<()> {
    if std::ptr::eq(a, b) {
        Ok(())
    } else {
        Err(Error::Domain("functions live on different graphs".into()))
    }
}

/// Differences along feasible edges, optionally restricted to one player.
fn differentiate<'g, T: Scalar>(u: &VertexFunction<'g, T>, only: Option<usize>) -> EdgeFunction<'g, T> {
    let g = u.graph;
    let n = g.players();
    let half = 1usize << (n - 1);
    let mut values = vec![T::zero(); full_edge_count(n)];
    par::for_each_chunk(&mut values, half, |player, chunk| {
        if only.is_some_and(|i| i != player) {
            return;
        }
        for (k, slot) in chunk.iter_mut().enumerate() {
            let idx = player * half + k;
            if g.edge_feasible_at(idx) {
                let e = crate::graph::edge_at(n, idx);
                *slot = u.values[e.head().index()].clone() - u.values[e.base.index()].clone();
            }
        }
    });
    EdgeFunction { graph: g, values }
}

/// `(du)(S, S ∪ {i}) = u(S ∪ {i}) − u(S)`.
pub fn d<'g, T: Scalar>(u: &VertexFunction<'g, T>) -> EdgeFunction<'g, T> {
    differentiate(u, None)
}

/// `d` restricted to player `i`'s edges; zero on every other edge.
pub fn d_i<'g, T: Scalar>(i: PlayerId, u: &VertexFunction<'g, T>) -> Result<EdgeFunction<'g, T>> {
    check_player(u.graph, i)?;
    Ok(differentiate(u, Some(i.0)))
}

/// Weighted adjoint of `d`: incoming edges add `w·f`, outgoing edges subtract it.
pub fn d_star<'g, T: Scalar>(f: &EdgeFunction<'g, T>) -> VertexFunction<'g, T> {
    let g = f.graph;
    let n = g.players();
    let mut values = vec![T::zero(); 1 << n];
    par::for_each_indexed(&mut values, |k, out| {
        let s = Coalition::from_bits(k as u32);
        if !g.contains_vertex(s) {
            return;
        }
        let mut acc = T::zero();
        for j in 0..n {
            let p = PlayerId(j);
            let base = s.without(p);
            let idx = edge_index(n, base, j);
            if !g.edge_feasible_at(idx) {
                continue;
            }
            let wf = g.weight_at::<T>(idx, base).clone() * f.values[idx].clone();
            if s.contains(p) {
                acc += wf;
            } else {
                acc -= wf;
            }
        }
        *out = acc;
    });
    VertexFunction { graph: g, values }
}

/// `L_w u = d*_w d u`, evaluated vertex by vertex as `Σ_b w(a,b) (u(a) − u(b))`.
pub fn laplacian_apply<'g, T: Scalar>(u: &VertexFunction<'g, T>) -> VertexFunction<'g, T> {
    let mut out = vec![T::zero(); u.values.len()];
    laplacian_into(u.graph, &u.values, &mut out, None);
    VertexFunction {
        graph: u.graph,
        values: out,
    }
}

/// `L_{w_i} u = d*_w d_i u`: the Laplacian of player `i`'s edges alone.
pub fn laplacian_i_apply<'g, T: Scalar>(
    i: PlayerId,
    u: &VertexFunction<'g, T>,
) -> Result<VertexFunction<'g, T>> {
    check_player(u.graph, i)?;
    let mut out = vec![T::zero(); u.values.len()];
    laplacian_into(u.graph, &u.values, &mut out, Some(i.0));
    Ok(VertexFunction {
        graph: u.graph,
        values: out,
    })
}

/// Slice kernel behind both Laplacians; `only` selects a single player's edges.
pub(crate) fn laplacian_into<T: Scalar>(g: &GameGraph, u: &[T], out: &mut [T], only: Option<usize>) {
    let n = g.players();
    par::for_each_indexed(out, |k, slot| {
        let s = Coalition::from_bits(k as u32);
        if !g.contains_vertex(s) {
            *slot = T::zero();
            return;
        }
        let players = match only {
            Some(i) => i..i + 1,
            None => 0..n,
        };
        let mut acc = T::zero();
        for j in players {
            let p = PlayerId(j);
            let base = s.without(p);
            let idx = edge_index(n, base, j);
            if !g.edge_feasible_at(idx) {
                continue;
            }
            let other = if s.contains(p) { base } else { s.with(p) };
            acc += g.weight_at::<T>(idx, base).clone() * (u[k].clone() - u[other.index()].clone());
        }
        *slot = acc;
    });
}

/// Float specialization of [`laplacian_into`] for the CG inner loop.
pub(crate) fn laplacian_f64(g: &GameGraph, u: &[f64], out: &mut [f64]) {
    let n = g.players();
    let weights = <f64 as Scalar>::weight_table(g);
    par::for_each_indexed(out, |k, slot| {
        let s = Coalition::from_bits(k as u32);
        if !g.contains_vertex(s) {
            *slot = 0.0;
            return;
        }
        let mut acc = 0.0;
        for j in 0..n {
            let p = PlayerId(j);
            let base = s.without(p);
            let idx = edge_index(n, base, j);
            if g.edge_feasible_at(idx) {
                let other = if s.contains(p) { base } else { s.with(p) };
                acc += weights.get(idx, base) * (u[k] - u[other.index()]);
            }
        }
        *slot = acc;
    });
}

/// `⟨f, g⟩_w = Σ_e w(e) f(e) g(e)`.
pub fn edge_inner_product<T: Scalar>(f: &EdgeFunction<'_, T>, g2: &EdgeFunction<'_, T>) -> Result<T> {
    same_graph(f.graph, g2.graph)?;
    let g = f.graph;
    Ok(g.feasible_edges()
        .map(|(k, e)| g.weight_at::<T>(k, e.base).clone() * f.values[k].clone() * g2.values[k].clone())
        .sum())
}

fn check_player(g: &GameGraph, i: PlayerId) -> Result<()> {
    if i.0 >= g.players() {
        return Err(Error::Domain(format!(
            "player {i} out of range for {} players",
            g.players()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_glove_game;
    use crate::graph::{Edge, EdgeWeighting};
    use crate::scalar::{rational, Rational};
    use num::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn c(m: &[usize]) -> Coalition {
        Coalition::from_members(m.iter().copied())
    }

    fn random_q(rng: &mut ChaCha8Rng) -> Rational {
        rational(rng.random_range(-9..=9), rng.random_range(1..=4))
    }

    /// A handful of weighted and restricted graphs for n ≤ 4.
    fn zoo(rng: &mut ChaCha8Rng) -> Vec<GameGraph> {
        let mut out = Vec::new();
        for n in 1..=4 {
            out.push(GameGraph::full_hypercube(n, EdgeWeighting::unit()).unwrap());
            out.push(GameGraph::full_hypercube(n, EdgeWeighting::size_plus_one(n)).unwrap());
            let mut map = BTreeMap::new();
            let full = GameGraph::full_hypercube(n, EdgeWeighting::unit()).unwrap();
            for (_, e) in full.feasible_edges() {
                map.insert(e, rational(rng.random_range(1..=6), rng.random_range(1..=3)));
            }
            out.push(full.with_weighting(EdgeWeighting::Explicit(map)).unwrap());
        }
        let q3 = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
        out.push(q3.restrict(&[c(&[1])], &[]).unwrap());
        out.push(q3.restrict(&[c(&[1])], &[]).unwrap().degree_product_weighting());
        let q4 = GameGraph::full_hypercube(4, EdgeWeighting::size_plus_one(4)).unwrap();
        out.push(
            q4.restrict(&[c(&[0, 1]), c(&[2])], &[Edge::new(c(&[3]), PlayerId(0)).unwrap()])
                .unwrap(),
        );
        out
    }

    /// Dense (D − A)-style assembly straight from the weights.
    fn dense_laplacian(g: &GameGraph) -> Vec<Vec<Rational>> {
        let m = 1 << g.players();
        let mut a = vec![vec![Rational::zero(); m]; m];
        for (_, e) in g.feasible_edges() {
            let w = g.weight(e).unwrap();
            let (s, t) = (e.base.index(), e.head().index());
            a[s][s] += &w;
            a[t][t] += &w;
            a[s][t] -= &w;
            a[t][s] -= &w;
        }
        a
    }

    #[test]
    fn d_examples() {
        let g = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
        let k = VertexFunction::from_fn(&g, |_| rational(7, 2));
        assert!(d(&k).is_zero());
        let v = VertexFunction::from_game(&g, &make_glove_game()).unwrap();
        let dv = d(&v);
        assert_eq!(*dv.at(c(&[2]), PlayerId(0)), Rational::one());
        let grand = Coalition::grand(3);
        let ind = VertexFunction::from_fn(&g, |s| Rational::from_i64(i64::from(s == grand)));
        for (k, e) in g.feasible_edges() {
            assert_eq!(!d(&ind).values()[k].is_zero(), e.head() == grand);
        }
    }

    #[test]
    fn partial_derivatives() {
        let g = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
        let v = VertexFunction::from_game(&g, &make_glove_game()).unwrap();
        let d0 = d_i(PlayerId(0), &v).unwrap();
        assert_eq!(*d0.at(c(&[1]), PlayerId(0)), Rational::one());
        assert_eq!(*d0.at(c(&[0]), PlayerId(1)), Rational::zero());
        let mut total = EdgeFunction::zeros(&g);
        for i in 0..3 {
            total = total.add(&d_i(PlayerId(i), &v).unwrap());
        }
        assert_eq!(total.values(), d(&v).values());
        let k = VertexFunction::from_fn(&g, |_| Rational::one());
        assert!(d_i(PlayerId(1), &k).unwrap().is_zero());
        assert!(d_i(PlayerId(3), &k).is_err());
    }

    #[test]
    fn single_edge_adjoint() {
        let g = GameGraph::full_hypercube(1, EdgeWeighting::unit()).unwrap();
        let f = EdgeFunction::<Rational>::indicator(&g, Coalition::EMPTY, PlayerId(0)).unwrap();
        let df = d_star(&f);
        assert_eq!(*df.at(Coalition::EMPTY), rational(-1, 1));
        assert_eq!(*df.at(c(&[0])), rational(1, 1));
    }

    #[test]
    fn adjointness_exact_on_zoo() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in zoo(&mut rng) {
            for _ in 0..3 {
                let n = g.players();
                let u = VertexFunction::new(&g, (0..1 << n).map(|_| random_q(&mut rng)).collect())
                    .unwrap();
                let f = EdgeFunction {
                    graph: &g,
                    values: (0..full_edge_count(n))
                        .map(|k| if g.edge_feasible_at(k) { random_q(&mut rng) } else { Rational::zero() })
                        .collect(),
                };
                let lhs = edge_inner_product(&d(&u), &f).unwrap();
                let rhs = u.inner(&d_star(&f)).unwrap();
                assert_eq!(lhs, rhs);
                let constant = VertexFunction::from_fn(&g, |_| rational(3, 1));
                assert!(d_star(&d(&constant)).values().iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn laplacian_matches_dense_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in zoo(&mut rng) {
            let dense = dense_laplacian(&g);
            let u = VertexFunction::new(&g, (0..1 << g.players()).map(|_| random_q(&mut rng)).collect())
                .unwrap();
            let w = VertexFunction::new(&g, (0..1 << g.players()).map(|_| random_q(&mut rng)).collect())
                .unwrap();
            let lu = laplacian_apply(&u);
            for s in 0..u.values().len() {
                let expect: Rational = (0..u.values().len())
                    .map(|t| dense[s][t].clone() * u.values()[t].clone())
                    .sum();
                assert_eq!(lu.values()[s], expect);
            }
            // same as composing the two operators
            assert_eq!(lu.values(), d_star(&d(&u)).values());
            // symmetric, positive semidefinite, columns sum to zero
            let lw = laplacian_apply(&w);
            assert_eq!(u.inner(&lw).unwrap(), lu.inner(&w).unwrap());
            assert!(u.inner(&lu).unwrap() >= Rational::zero());
            assert!(lu.values().iter().cloned().sum::<Rational>().is_zero());
            assert_eq!(edge_inner_product(&d(&u), &d(&w)).unwrap(), u.inner(&lw).unwrap());
            // float kernel agrees
            let uf: Vec<f64> = u.values().iter().map(Scalar::to_f64).collect();
            let mut out = vec![0.0; uf.len()];
            laplacian_f64(&g, &uf, &mut out);
            for (a, b) in out.iter().zip(lu.values()) {
                assert!((a - b.to_f64()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        let g = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
        let delta = VertexFunction::from_fn(&g, |s| Rational::from_i64(i64::from(s.is_empty())));
        let l = laplacian_apply(&delta);
        for s in g.feasible_vertices() {
            let expect = match s.len() {
                0 => 3,
                1 => -1,
                _ => 0,
            };
            assert_eq!(*l.at(s), rational(expect, 1));
        }
        let k = VertexFunction::from_fn(&g, |_| rational(5, 3));
        assert!(laplacian_apply(&k).values().iter().all(Zero::is_zero));
    }

    #[test]
    fn partial_laplacians() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in zoo(&mut rng) {
            let n = g.players();
            let u = VertexFunction::new(&g, (0..1 << n).map(|_| random_q(&mut rng)).collect()).unwrap();
            let mut total = vec![Rational::zero(); 1 << n];
            for i in 0..n {
                let li = laplacian_i_apply(PlayerId(i), &u).unwrap();
                assert_eq!(li.values(), d_star(&d_i(PlayerId(i), &u).unwrap()).values());
                for (t, x) in total.iter_mut().zip(li.values()) {
                    *t += x;
                }
            }
            assert_eq!(total, laplacian_apply(&u).values());
        }
        let g = GameGraph::full_hypercube(4, EdgeWeighting::unit()).unwrap();
        let v = VertexFunction::new(&g, (0..16).map(|_| random_q(&mut rng)).collect()).unwrap();
        for i in 0..4 {
            let p = PlayerId(i);
            let li = laplacian_i_apply(p, &v).unwrap();
            for t in g.feasible_vertices().filter(|t| !t.contains(p)) {
                assert_eq!(*li.at(t.with(p)), -li.at(t).clone());
                assert_eq!(*li.at(t.with(p)), v.at(t.with(p)).clone() - v.at(t).clone());
            }
        }
        let k = VertexFunction::from_fn(&g, |_| Rational::one());
        assert!(laplacian_i_apply(PlayerId(2), &k).unwrap().values().iter().all(Zero::is_zero));
    }

    #[test]
    fn inner_product_properties() {
        let g = GameGraph::full_hypercube(3, EdgeWeighting::Constant(rational(5, 2))).unwrap();
        let unit = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
        let vals: Vec<Rational> = (0..12).map(|k| rational(k - 4, 3)).collect();
        let f = EdgeFunction { graph: &g, values: vals.clone() };
        let f1 = EdgeFunction { graph: &unit, values: vals };
        let ff = edge_inner_product(&f, &f).unwrap();
        assert!(ff > Rational::zero());
        assert_eq!(ff, rational(5, 2) * edge_inner_product(&f1, &f1).unwrap());
        let z = EdgeFunction::<Rational>::zeros(&g);
        assert!(edge_inner_product(&z, &z).unwrap().is_zero());
        assert!(matches!(edge_inner_product(&f, &f1), Err(Error::Domain(_))));
    }
}
