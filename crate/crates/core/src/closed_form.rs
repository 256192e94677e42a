//! Closed-form and combinatorial reference computations.
//!
//! These are deliberately independent of the Laplacian solvers: the classical
//! Shapley formula, an average over player orderings, the ordering average
//! restricted to feasible paths, the discrete Green's function of the unit
//! hypercube, and the explicit component formulas derived from it.
//!
//! Binomial sums are evaluated in exact integers and the formulas in rational
//! arithmetic whatever the game's mode; float inputs are promoted first.

use crate::coalition::{check_player_count, Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::{EdgeWeighting, GameGraph};
use crate::operators::{d_star, EdgeFunction};
use crate::par;
use crate::scalar::{Rational, Scalar};
use crate::solve::{Backend, Decomposer, SolverConfig};
use num::{BigInt, One, Zero};

/// Largest player count accepted by [`shapley_permutation_oracle`].
pub const PERMUTATION_ORACLE_MAX_PLAYERS: usize = 10;

/// Exact binomial tables for one player count.
struct Binomials {
    n: usize,
    /// `C(n, m)` for `m = 0..=n`.
    row_n: Vec<BigInt>,
    /// `C(n−1, j)` for `j = 0..n`.
    row_prev: Vec<BigInt>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let row = |k: usize| {
            let mut out = vec![BigInt::one()];
            for m in 1..=k {
                let next = &out[m - 1] * BigInt::from(k + 1 - m) / BigInt::from(m);
                out.push(next);
            }
            out
        };
        Binomials {
            n,
            row_n: row(n),
            row_prev: row(n.saturating_sub(1)),
        }
    }

    /// `C(n,0) + … + C(n,j)`.
    fn lower(&self, j: usize) -> BigInt {
        self.row_n[..=j].iter().sum()
    }

    /// `C(n,j+1) + … + C(n,n)`.
    fn upper(&self, j: usize) -> BigInt {
        self.row_n[j + 1..].iter().sum()
    }

    fn ratio(&self, num: BigInt, j: usize) -> Rational {
        Rational::new(num, self.row_prev[j].clone())
    }

    /// `1 / (n · 2^n)`.
    fn scale(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.n) << self.n)
    }
}

fn check_player<T: Scalar>(v: &Game<T>, i: PlayerId) -> Result<()> {
    if i.0 >= v.players() {
        return Err(Error::Domain(format!(
            "player {i} is out of range for a {}-player game",
            v.players()
        )));
    }
    Ok(())
}

/// Classical Shapley value `φ_i(v) = Σ_{S ⊂ N∖i} |S|!(n−1−|S|)!/n! · (v(S∪i) − v(S))`.
pub fn shapley_direct<T: Scalar>(v: &Game<T>, i: PlayerId) -> Result<T> {
    check_player(v, i)?;
    let n = v.players();
    // marginals grouped by |S|, then one multiply per size
    let mut by_size = vec![T::zero(); n];
    for bits in 0..1u32 << n {
        let s = Coalition::from_bits(bits);
        if !s.contains(i) {
            by_size[s.len()] += v.marginal(s, i);
        }
    }
    let binom = Binomials::new(n);
    Ok(by_size
        .into_iter()
        .enumerate()
        .map(|(k, total)| {
            let weight = Rational::new(BigInt::one(), BigInt::from(n) * &binom.row_prev[k]);
            T::from_rational(&weight) * total
        })
        .sum())
}

/// Average of `i`'s marginal contribution over all `n!` orderings of the players.
///
/// Orderings are enumerated explicitly, split by their first player across
/// threads, and tallied per predecessor coalition before the final reduction.
pub fn shapley_permutation_oracle<T: Scalar>(v: &Game<T>, i: PlayerId) -> Result<T> {
    check_player(v, i)?;
    let n = v.players();
    if n > PERMUTATION_ORACLE_MAX_PLAYERS {
        return Err(Error::Capacity {
            what: "players for permutation enumeration",
            got: n,
            limit: PERMUTATION_ORACLE_MAX_PLAYERS,
        });
    }
    let tallies = par::map_range(n, |first| {
        let mut counts = vec![0u64; 1 << n];
        let mut order: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&j| j != first)).collect();
        loop {
            let mut before = Coalition::EMPTY;
            for &j in &order {
                if j == i.0 {
                    counts[before.index()] += 1;
                    break;
                }
                before = before.with(PlayerId(j));
            }
            if !next_permutation(&mut order[1..]) {
                break;
            }
        }
        counts
    });
    let mut counts = vec![0u64; 1 << n];
    for t in tallies {
        for (c, x) in counts.iter_mut().zip(t) {
            *c += x;
        }
    }
    let orderings: u64 = counts.iter().sum();
    let total: T = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(bits, &c)| T::from_i64(c as i64) * v.marginal(Coalition::from_bits(bits as u32), i))
        .sum();
    Ok(total / T::from_i64(orderings as i64))
}

/// Lexicographic successor in place; `false` once the last ordering is reached.
fn next_permutation(a: &mut [usize]) -> bool {
    let Some(pivot) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let succ = a.iter().rposition(|&x| x > a[pivot]).expect("pivot has a successor");
    a.swap(pivot, succ);
    a[pivot + 1..].reverse();
    true
}

/// Shapley-style average over orderings whose every prefix is a feasible
/// coalition of `g` reached through a feasible edge.
///
/// Orderings are counted by path counting on the feasible subgraph: the number
/// of feasible orderings in which `i` joins coalition `S` is the number of
/// monotone paths `∅ → S` times the number of monotone paths `S∪i → N`.
pub fn precedence_shapley_oracle<T: Scalar>(g: &GameGraph, v: &Game<T>, i: PlayerId) -> Result<T> {
    check_player(v, i)?;
    let n = g.players();
    if v.players() != n {
        return Err(Error::Domain(format!("{}-player game on a {n}-player graph", v.players())));
    }
    let size = 1usize << n;
    let step_ok = |s: Coalition, j: usize| {
        let t = s.with(PlayerId(j));
        g.contains_vertex(t) && g.contains_edge(crate::graph::Edge { base: s, player: PlayerId(j) })
    };
    let by_size = |ascending: bool| {
        let mut order: Vec<Coalition> = (0..size as u32).map(Coalition::from_bits).collect();
        order.sort_by_key(|s| if ascending { s.len() } else { n - s.len() });
        order
    };
    // paths from ∅ to each coalition
    let mut from_empty = vec![0u128; size];
    from_empty[0] = 1;
    for s in by_size(true) {
        if from_empty[s.index()] == 0 {
            continue;
        }
        for j in (0..n).filter(|&j| !s.contains(PlayerId(j))) {
            if step_ok(s, j) {
                from_empty[s.with(PlayerId(j)).index()] += from_empty[s.index()];
            }
        }
    }
    // paths from each coalition to N
    let grand = Coalition::grand(n);
    let mut to_grand = vec![0u128; size];
    to_grand[grand.index()] = 1;
    for s in by_size(false) {
        if !g.contains_vertex(s) || s == grand {
            continue;
        }
        to_grand[s.index()] = (0..n)
            .filter(|&j| !s.contains(PlayerId(j)) && step_ok(s, j))
            .map(|j| to_grand[s.with(PlayerId(j)).index()])
            .sum();
    }
    let orderings = to_grand[0];
    if orderings == 0 {
        return Err(Error::Infeasible {
            coalition: Coalition::EMPTY,
            reason: "has no feasible ordering to the grand coalition".into(),
        });
    }
    let count = |c: u128| T::from_rational(&Rational::from_integer(BigInt::from(c)));
    let mut total = T::zero();
    for bits in 0..size as u32 {
        let s = Coalition::from_bits(bits);
        if s.contains(i) || !step_ok(s, i.0) {
            continue;
        }
        let c = from_empty[s.index()] * to_grand[s.with(i).index()];
        if c > 0 {
            total += count(c) * v.marginal(s, i);
        }
    }
    Ok(total / count(orderings))
}

/// Discrete Green's function of the unit-weight hypercube Laplacian on
/// mean-zero functions. `K(S,T)` depends only on `|S △ T|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensKernel {
    n: usize,
    by_distance: Vec<Rational>,
}

impl GreensKernel {
    pub fn players(&self) -> usize {
        self.n
    }

    /// `K` at Hamming distance `k`, `0 ≤ k ≤ n`.
    pub fn at_distance(&self, k: usize) -> &Rational {
        &self.by_distance[k]
    }

    pub fn by_distance(&self) -> &[Rational] {
        &self.by_distance
    }

    pub fn entry(&self, s: Coalition, t: Coalition) -> &Rational {
        self.at_distance(s.symmetric_difference(t).len())
    }

    /// `(K y)(S) = Σ_T K(S,T) y(T)`.
    pub fn apply(&self, y: &[Rational]) -> Vec<Rational> {
        par::map_range(y.len(), |s| {
            let s = Coalition::from_bits(s as u32);
            y.iter()
                .enumerate()
                .filter(|(_, yt)| !yt.is_zero())
                .map(|(t, yt)| self.entry(s, Coalition::from_bits(t as u32)) * yt)
                .sum()
        })
    }
}

/// Tabulates `K(k) = 1/(n·4^n) · (−Σ_{j<k} A_j B_j / C(n−1,j) + Σ_{j≥k} B_j² / C(n−1,j))`
/// with `A_j = C(n,0)+…+C(n,j)` and `B_j = C(n,j+1)+…+C(n,n)`.
pub fn greens_kernel(n: usize) -> Result<GreensKernel> {
    if n == 0 {
        return Err(Error::Domain("the Green's function needs at least one player".into()));
    }
    check_player_count(n)?;
    let b = Binomials::new(n);
    let lead = |j: usize| b.ratio(b.lower(j) * b.upper(j), j);
    let tail = |j: usize| b.ratio(b.upper(j) * b.upper(j), j);
    let norm = Rational::new(BigInt::one(), BigInt::from(n) << (2 * n));
    let by_distance = (0..=n)
        .map(|k| {
            let neg: Rational = (0..k).map(lead).sum();
            let pos: Rational = (k..n).map(tail).sum();
            (pos - neg) * &norm
        })
        .collect();
    Ok(GreensKernel { n, by_distance })
}

/// Player `i`'s component game from the explicit Green's-function formula
///
/// `u_i(S∪i) = 1/(n·2^n) · Σ_{T ⊂ N∖i} B_{|S△T|}/C(n−1,|S△T|) · (v(T∪i) − v(T))`,
/// `u_i(S) = −u_i(S∪i)`, returning `v_i = u_i − u_i(∅)`.
///
/// Only valid on the full hypercube with constant weights.
pub fn component_explicit<T: Scalar>(g: &GameGraph, v: &Game<T>, i: PlayerId) -> Result<Game<T>> {
    check_player(v, i)?;
    if !g.is_full() || !g.has_constant_weights() {
        return Err(Error::Domain(
            "the explicit component formula holds only on the full hypercube with constant weights".into(),
        ));
    }
    let n = v.players();
    if g.players() != n {
        return Err(Error::Domain(format!("{n}-player game on a {}-player graph", g.players())));
    }
    let b = Binomials::new(n);
    let scale = b.scale();
    let coef: Vec<Rational> = (0..n).map(|k| b.ratio(b.upper(k), k) * &scale).collect();
    let others: Vec<Coalition> = (0..1u32 << n)
        .map(Coalition::from_bits)
        .filter(|s| !s.contains(i))
        .collect();
    let marginals: Vec<Rational> = others.iter().map(|&t| v.marginal(t, i).to_rational()).collect();
    let with_i = par::map_range(others.len(), |a| {
        let s = others[a];
        others
            .iter()
            .zip(&marginals)
            .filter(|(_, m)| !m.is_zero())
            .map(|(&t, m)| &coef[s.symmetric_difference(t).len()] * m)
            .sum::<Rational>()
    });
    let mut u = vec![Rational::zero(); 1 << n];
    for (s, x) in others.iter().zip(with_i) {
        u[s.index()] = -x.clone();
        u[s.with(i).index()] = x;
    }
    let shift = u[0].clone();
    let values = u.iter().map(|x| T::from_rational(&(x - &shift))).collect();
    Game::new(n, values)
}

/// Player `i`'s component game of the pure bargaining game (`v(S) = 0` for
/// `S ≠ N`, `v(N) = total`) evaluated at `s`, from the closed form
///
/// `v_i(S∪i) = (1 + A_{|S|}/C(n−1,|S|)) · total / (n·2^n)`,
/// `v_i(S) = (1 − A_{|S|}/C(n−1,|S|)) · total / (n·2^n)` for `S ⊂ N∖i`.
pub fn pure_bargaining_component<T: Scalar>(n: usize, total: &T, i: PlayerId, s: Coalition) -> Result<T> {
    if n == 0 || i.0 >= n {
        return Err(Error::Domain(format!("player {i} is out of range for {n} players")));
    }
    check_player_count(n)?;
    if !s.is_subset(Coalition::grand(n)) {
        return Err(Error::Domain(format!("coalition {s} is not a subset of {n} players")));
    }
    let b = Binomials::new(n);
    let rest = s.without(i);
    let ratio = b.ratio(b.lower(rest.len()), rest.len());
    let factor = if s.contains(i) {
        Rational::one() + ratio
    } else {
        Rational::one() - ratio
    };
    Ok(T::from_rational(&(factor * b.scale())) * total.clone())
}

/// Shapley weight of one edge, recovered by solving `L u = d*χ` on the unit
/// `n`-cube for the indicator `χ` of an edge `(S, S∪i)` with `|S| = s`, and
/// reading off `u(N)`. Should equal `s!(n−1−s)!/n!`.
pub fn verify_shapley_coefficient(n: usize, s: usize, i: PlayerId) -> Result<Rational> {
    if n == 0 || i.0 >= n || s >= n {
        return Err(Error::Domain(format!(
            "need i < n and s < n (got n = {n}, s = {s}, i = {i})"
        )));
    }
    let base = Coalition::from_members((0..n).filter(|&j| j != i.0).take(s));
    edge_shapley_coefficient(n, base, i)
}

pub(crate) fn edge_shapley_coefficient(n: usize, base: Coalition, i: PlayerId) -> Result<Rational> {
    let g = GameGraph::full_hypercube(n, EdgeWeighting::unit())?;
    let chi = EdgeFunction::<Rational>::indicator(&g, base, i)?;
    let rhs = d_star(&chi).into_values();
    let solver = Decomposer::new(&g, SolverConfig::with_backend(Backend::DenseRational))?;
    let (u, _) = solver.solve_laplacian(&rhs, i.0)?;
    Ok(u[Coalition::grand(n).index()].clone())
}
