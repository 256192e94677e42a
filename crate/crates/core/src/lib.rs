//! Decomposition of transferable-utility cooperative games into per-player
//! component games.
//!
//! A game on `n` players is a function on the vertices of the `n`-dimensional
//! hypercube graph (coalitions), and its marginal contributions live on the
//! oriented edges `(S, S ∪ {i})`. Player `i`'s component game `v_i` is the
//! weighted least-squares solution of `d v_i = d_i v` normalized by
//! `v_i(∅) = 0`, equivalently the solution of the singular Laplacian system
//! `L_w v_i = L_{w_i} v`. The grand-coalition values `v_i(N)` recover the
//! Shapley value on the full hypercube with permutation-invariant weights.
//!
//! Graphs may carry positive edge weights and may be restricted to a connected
//! subgraph containing `∅` and `N` (restricted cooperation).
//!
//! ```
//! use shapley_hodge::prelude::*;
//!
//! let glove = make_glove_game();
//! let graph = GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap();
//! let dec = decompose(&graph, &glove, &SolverConfig::default()).unwrap();
//! assert_eq!(dec.allocation()[0], rational(2, 3));
//! ```

#![forbid(unsafe_code)]

pub mod closed_form;
pub mod coalition;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod io;
pub mod operators;
mod par;
pub mod report;
pub mod scalar;
pub mod solve;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::closed_form::{
        component_explicit, greens_kernel, precedence_shapley_oracle, pure_bargaining_component,
        shapley_direct, shapley_permutation_oracle, verify_shapley_coefficient, GreensKernel,
    };
    pub use crate::coalition::{
        apply_permutation, distance, enumerate_coalitions, Coalition, Permutation, PlayerId,
        MAX_PLAYERS,
    };
    pub use crate::error::{Error, Result};
    pub use crate::game::{
        is_inessential, linear_combine, make_glove_game, make_inessential_game,
        make_pure_bargaining_game, pullback, DynGame, Game,
    };
    pub use crate::graph::{Edge, EdgeWeighting, GameGraph};
    pub use crate::operators::{
        d, d_i, d_star, edge_inner_product, laplacian_apply, laplacian_i_apply, EdgeFunction,
        VertexFunction,
    };
    pub use crate::scalar::{rational, Rational, Scalar, ScalarMode};
    pub use crate::solve::{
        decompose, residual_orthogonality, solve_component, Backend, Decomposer, Decomposition,
        SolveDiagnostics, SolverConfig,
    };
}
