//! Solvers for `L_w v_i = L_{w_i} v` with `v_i(∅) = 0`, and the decomposition
//! driver that produces every player's component game.
//!
//! Three backends:
//!
//! * `DenseRational`: exact. The `∅` row and column are deleted and the
//!   reduced nonsingular system is solved by rational elimination (small
//!   systems) or by p-adic lifting (larger ones).
//! * `DenseFloat`: the same pinned system, LU-factored in binary64.
//! * `ConjugateGradient`: matrix-free CG on the full vertex space with the
//!   constant nullspace deflated, followed by a shift to `v_i(∅) = 0`.
//!
//! A [`Decomposer`] factors the graph once and is reused across games.

mod cg;
pub(crate) mod dense;
pub(crate) mod modular;

use crate::coalition::{Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::game::{Game, FLOAT_GAME_TOLERANCE};
use crate::graph::{edge_index, GameGraph};
use crate::operators::{d, d_i, d_star, laplacian_into, EdgeFunction, VertexFunction};
use crate::par;
use crate::scalar::{Rational, Scalar, ScalarMode};
use dense::LuFactor;
use modular::ModularFactor;
use serde::{Deserialize, Serialize};

/// Dense backends store an `m × m` matrix with `m = 2^n − 1`.
pub const DENSE_MAX_PLAYERS: usize = 12;

// Reduced systems up to this size use plain rational elimination.
const RATIONAL_ELIMINATION_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    DenseRational,
    DenseFloat,
    #[serde(rename = "cg_float")]
    ConjugateGradient,
}

impl Backend {
    pub fn mode(self) -> ScalarMode {
        match self {
            Backend::DenseRational => ScalarMode::Rational,
            Backend::DenseFloat | Backend::ConjugateGradient => ScalarMode::Float,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::DenseRational => "dense_rational",
            Backend::DenseFloat => "dense_float",
            Backend::ConjugateGradient => "cg_float",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Relative residual target for CG.
    pub cg_tolerance: f64,
    /// Iteration cap for CG; `None` means `10·2^n`.
    pub cg_max_iters: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::DenseRational,
            cg_tolerance: 1e-12,
            cg_max_iters: None,
        }
    }
}

impl SolverConfig {
    pub fn with_backend(backend: Backend) -> Self {
        SolverConfig {
            backend,
            ..SolverConfig::default()
        }
    }

    /// Exact elimination for rational games, CG for float games.
    pub fn for_mode(mode: ScalarMode) -> Self {
        SolverConfig::with_backend(match mode {
            ScalarMode::Rational => Backend::DenseRational,
            ScalarMode::Float => Backend::ConjugateGradient,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cg_tolerance > 0.0 && self.cg_tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "cg_tolerance must be positive, got {}",
                self.cg_tolerance
            )));
        }
        if self.cg_max_iters == Some(0) {
            return Err(Error::Config("cg_max_iters must be at least 1".into()));
        }
        Ok(())
    }

    fn max_iters(&self, n: usize) -> usize {
        self.cg_max_iters.unwrap_or(10 << n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub player: usize,
    pub backend: Backend,
    /// CG iterations; zero for direct solves.
    pub iterations: usize,
    /// Relative residual `‖L_w x − b‖ / ‖b‖`; exactly zero for rational solves.
    pub residual: f64,
}

/// Component games `v_i` (one per player) plus per-solve diagnostics.
///
/// On restricted graphs the components are zero at infeasible coalitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    components: Vec<Game<T>>,
    diagnostics: Vec<SolveDiagnostics>,
}

impl<T: Scalar> Decomposition<T> {
    pub fn players(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Game<T>] {
        &self.components
    }

    pub fn component(&self, i: PlayerId) -> &Game<T> {
        &self.components[i.0]
    }

    pub fn diagnostics(&self) -> &[SolveDiagnostics] {
        &self.diagnostics
    }

    /// Grand-coalition values `v_i(N)`.
    pub fn allocation(&self) -> Vec<T> {
        self.components.iter().map(|c| c.grand_value().clone()).collect()
    }

    /// `max_S |Σ_i v_i(S) − v(S)|` over feasible coalitions.
    pub fn efficiency_defect(&self, graph: &GameGraph, v: &Game<T>) -> T {
        graph
            .feasible_vertices()
            .map(|s| {
                let total: T = self.components.iter().map(|c| c.value(s).clone()).sum();
                (total - v.value(s).clone()).abs()
            })
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Whether the components sum to `v` (exactly, or to `1e-9` relative in float mode).
    pub fn is_efficient(&self, graph: &GameGraph, v: &Game<T>) -> bool {
        self.efficiency_defect(graph, v)
            .is_negligible(FLOAT_GAME_TOLERANCE, v.sup_norm())
    }
}

enum Factor {
    Rational(LuFactor<Rational>),
    Lifted(ModularFactor),
    Float(LuFactor<f64>),
    Matrixless,
}

/// Reusable solver for one graph and configuration.
pub struct Decomposer<'g> {
    graph: &'g GameGraph,
    config: SolverConfig,
    /// Position of each coalition in the pinned system (`usize::MAX` if absent).
    position: Vec<usize>,
    unknowns: Vec<Coalition>,
    factor: Factor,
}

impl<'g> Decomposer<'g> {
    pub fn new(graph: &'g GameGraph, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let n = graph.players();
        let unknowns: Vec<Coalition> = graph.feasible_vertices().filter(|s| !s.is_empty()).collect();
        let mut position = vec![usize::MAX; 1 << n];
        for (k, s) in unknowns.iter().enumerate() {
            position[s.index()] = k;
        }
        let mut dec = Decomposer {
            graph,
            config,
            position,
            unknowns,
            factor: Factor::Matrixless,
        };
        dec.factor = match config.backend {
            Backend::ConjugateGradient => Factor::Matrixless,
            dense => {
                if n > DENSE_MAX_PLAYERS {
                    return Err(Error::Config(format!(
                        "{dense} stores a dense matrix and is limited to {DENSE_MAX_PLAYERS} players (got {n}); use cg_float"
                    )));
                }
                if dense == Backend::DenseFloat {
                    Factor::Float(LuFactor::factor(dec.dense_matrix::<f64>(), dec.unknowns.len())?)
                } else if dec.unknowns.len() <= RATIONAL_ELIMINATION_MAX {
                    Factor::Rational(LuFactor::factor(dec.dense_matrix::<Rational>(), dec.unknowns.len())?)
                } else {
                    match ModularFactor::new(dec.unknowns.len(), &dec.sparse_rows()) {
                        Some(f) => Factor::Lifted(f),
                        None => Factor::Rational(LuFactor::factor(
                            dec.dense_matrix::<Rational>(),
                            dec.unknowns.len(),
                        )?),
                    }
                }
            }
        };
        Ok(dec)
    }

    pub fn graph(&self) -> &'g GameGraph {
        self.graph
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Rows of the Laplacian with the `∅` row and column removed.
    fn sparse_rows<T: Scalar>(&self) -> Vec<Vec<(usize, T)>> {
        let g = self.graph;
        let n = g.players();
        self.unknowns
            .iter()
            .map(|&s| {
                let mut diag = T::zero();
                let mut row = Vec::with_capacity(n + 1);
                for (t, idx) in g.neighbors(s) {
                    let base = if t.is_subset(s) { t } else { s };
                    let w = g.weight_at::<T>(idx, base).clone();
                    if !t.is_empty() {
                        row.push((self.position[t.index()], -w.clone()));
                    }
                    diag += w;
                }
                row.push((self.position[s.index()], diag));
                row
            })
            .collect()
    }

    fn dense_matrix<T: Scalar>(&self) -> Vec<T> {
        let m = self.unknowns.len();
        let mut a = vec![T::zero(); m * m];
        for (i, row) in self.sparse_rows::<T>().into_iter().enumerate() {
            for (j, x) in row {
                a[i * m + j] = x;
            }
        }
        a
    }

    fn check_mode<T: Scalar>(&self) -> Result<()> {
        if T::MODE != self.config.backend.mode() {
            return Err(Error::Config(format!(
                "backend {} needs {} games, got a {} game",
                self.config.backend,
                self.config.backend.mode(),
                T::MODE
            )));
        }
        Ok(())
    }

    fn check_game<T: Scalar>(&self, v: &Game<T>) -> Result<()> {
        if v.players() != self.graph.players() {
            return Err(Error::Domain(format!(
                "{}-player game on a {}-player graph",
                v.players(),
                self.graph.players()
            )));
        }
        self.check_mode::<T>()
    }

    /// Solves `L_w x = rhs` with `x(∅) = 0` for any right-hand side orthogonal
    /// to constants. `rhs` is indexed by coalition.
    pub fn solve_laplacian<T: Scalar>(&self, rhs: &[T], player: usize) -> Result<(Vec<T>, SolveDiagnostics)> {
        self.check_mode::<T>()?;
        let len = 1usize << self.graph.players();
        if rhs.len() != len {
            return Err(Error::Domain(format!("right-hand side needs {len} entries")));
        }
        let reduced = |conv: &dyn Fn(&T) -> T| -> Vec<T> {
            self.unknowns.iter().map(|s| conv(&rhs[s.index()])).collect()
        };
        let expand = |sol: Vec<T>| -> Vec<T> {
            let mut full = vec![T::zero(); len];
            for (s, x) in self.unknowns.iter().zip(sol) {
                full[s.index()] = x;
            }
            full
        };
        let (x, iterations, residual) = match &self.factor {
            Factor::Rational(lu) => {
                let b: Vec<Rational> = self.unknowns.iter().map(|s| rhs[s.index()].to_rational()).collect();
                let sol = lu.solve(&b);
                (expand(sol.iter().map(T::from_rational).collect()), 0, 0.0)
            }
            Factor::Lifted(f) => {
                let b: Vec<Rational> = self.unknowns.iter().map(|s| rhs[s.index()].to_rational()).collect();
                let sol = f.solve(&b)?;
                (expand(sol.iter().map(T::from_rational).collect()), 0, 0.0)
            }
            Factor::Float(lu) => {
                let b: Vec<f64> = reduced(&|x: &T| x.clone()).iter().map(Scalar::to_f64).collect();
                let sol: Vec<T> = lu.solve(&b).into_iter().map(T::from_f64).collect();
                let x = expand(sol);
                let res = self.float_residual(&x, rhs);
                (x, 0, res)
            }
            Factor::Matrixless => {
                let b: Vec<f64> = rhs.iter().map(Scalar::to_f64).collect();
                let out = cg::solve(
                    self.graph,
                    &b,
                    self.config.cg_tolerance,
                    self.config.max_iters(self.graph.players()),
                    player,
                )?;
                let x = out.x.into_iter().map(T::from_f64).collect();
                (x, out.iterations, out.residual)
            }
        };
        Ok((
            x,
            SolveDiagnostics {
                player,
                backend: self.config.backend,
                iterations,
                residual,
            },
        ))
    }

    fn float_residual<T: Scalar>(&self, x: &[T], rhs: &[T]) -> f64 {
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let mut lx = vec![0.0; xf.len()];
        crate::operators::laplacian_f64(self.graph, &xf, &mut lx);
        let num: f64 = lx.iter().zip(rhs).map(|(a, b)| (a - b.to_f64()).powi(2)).sum();
        let den: f64 = rhs.iter().map(|b| b.to_f64().powi(2)).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    /// Right-hand sides `L_{w_i} v` for every player, in one pass over vertices.
    pub fn right_hand_sides<T: Scalar>(&self, v: &Game<T>) -> Vec<Vec<T>> {
        let g = self.graph;
        let n = g.players();
        let mut vertex_major = vec![T::zero(); n << n];
        let values = v.values();
        par::for_each_chunk(&mut vertex_major, n, |k, row| {
            let s = Coalition::from_bits(k as u32);
            if !g.contains_vertex(s) {
                return;
            }
            for (j, slot) in row.iter_mut().enumerate() {
                let p = PlayerId(j);
                let base = s.without(p);
                let idx = edge_index(n, base, j);
                if !g.edge_feasible_at(idx) {
                    continue;
                }
                let w = g.weight_at::<T>(idx, base).clone();
                let other = if s.contains(p) { base } else { s.with(p) };
                *slot = w * (values[k].clone() - values[other.index()].clone());
            }
        });
        let mut out = vec![Vec::with_capacity(1 << n); n];
        for row in vertex_major.chunks(n) {
            for (j, x) in row.iter().enumerate() {
                out[j].push(x.clone());
            }
        }
        out
    }

    /// Player `i`'s component game.
    pub fn component<T: Scalar>(&self, v: &Game<T>, i: PlayerId) -> Result<Game<T>> {
        Ok(self.component_with_diagnostics(v, i)?.0)
    }

    fn component_with_diagnostics<T: Scalar>(&self, v: &Game<T>, i: PlayerId) -> Result<(Game<T>, SolveDiagnostics)> {
        self.check_game(v)?;
        if i.0 >= v.players() {
            return Err(Error::Domain(format!("player {i} out of range")));
        }
        let mut rhs = vec![T::zero(); v.values().len()];
        laplacian_into(self.graph, v.values(), &mut rhs, Some(i.0));
        let (x, diag) = self.solve_laplacian(&rhs, i.0)?;
        Ok((Game::from_raw(v.players(), x), diag))
    }

    /// All component games; the per-player solves run concurrently.
    pub fn decompose<T: Scalar>(&self, v: &Game<T>) -> Result<Decomposition<T>> {
        self.check_game(v)?;
        let rhs = self.right_hand_sides(v);
        let solved = par::map_range(rhs.len(), |i| self.solve_laplacian(&rhs[i], i));
        let mut components = Vec::with_capacity(solved.len());
        let mut diagnostics = Vec::with_capacity(solved.len());
        for r in solved {
            let (x, diag) = r?;
            components.push(Game::from_raw(v.players(), x));
            diagnostics.push(diag);
        }
        Ok(Decomposition {
            components,
            diagnostics,
        })
    }
}

/// Solves for one component game `v_i`.
pub fn solve_component<T: Scalar>(graph: &GameGraph, v: &Game<T>, i: PlayerId, config: &SolverConfig) -> Result<Game<T>> {
    Decomposer::new(graph, *config)?.component(v, i)
}

/// Solves for every component game.
pub fn decompose<T: Scalar>(graph: &GameGraph, v: &Game<T>, config: &SolverConfig) -> Result<Decomposition<T>> {
    Decomposer::new(graph, *config)?.decompose(v)
}

/// The edge residual `d v_i − d_i v`; zero exactly when `d_i v` is a gradient.
pub fn edge_residual<'g, T: Scalar>(
    graph: &'g GameGraph,
    v: &Game<T>,
    component: &Game<T>,
    i: PlayerId,
) -> Result<EdgeFunction<'g, T>> {
    let vf = VertexFunction::from_game(graph, v)?;
    let cf = VertexFunction::from_game(graph, component)?;
    Ok(d(&cf).sub(&d_i(i, &vf)?))
}

/// `‖d*_w(d v_i − d_i v)‖∞` for each player; zero certifies the orthogonal split.
pub fn residual_orthogonality<T: Scalar>(graph: &GameGraph, v: &Game<T>, comp: &Decomposition<T>) -> Result<Vec<T>> {
    (0..comp.players())
        .map(|i| {
            let res = edge_residual(graph, v, comp.component(PlayerId(i)), PlayerId(i))?;
            Ok(d_star(&res)
                .values()
                .iter()
                .map(|x| x.abs())
                .fold(T::zero(), |a, b| if b > a { b } else { a }))
        })
        .collect()
}
