//! Conjugate gradients for the singular Laplacian system, with the constant
//! nullspace deflated by projecting iterates onto mean-zero functions.

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::graph::GameGraph;
use crate::operators::laplacian_f64;
use crate::par;

#[derive(Debug, Clone)]
pub(crate) struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `‖L x − b‖ / ‖b‖` of the returned solution.
    pub residual: f64,
}

struct Feasible<'a> {
    graph: &'a GameGraph,
    count: f64,
}

impl Feasible<'_> {
    fn project_mean_zero(&self, x: &mut [f64]) {
        let g = self.graph;
        let mean = par::sum_f64(x.len(), |k| x[k]) / self.count;
        par::for_each_indexed(x, |k, xk| {
            if g.contains_vertex(Coalition::from_bits(k as u32)) {
                *xk -= mean;
            }
        });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    par::sum_f64(a.len(), |k| a[k] * b[k])
}

/// Solves `L_w x = b` with `x(∅) = 0`. `b` must be orthogonal to constants.
pub(crate) fn solve(
    graph: &GameGraph,
    b: &[f64],
    tolerance: f64,
    max_iters: usize,
    player: usize,
) -> Result<CgOutcome> {
    let feasible = Feasible {
        graph,
        count: graph.vertex_count() as f64,
    };
    let len = b.len();
    let b_sum = par::sum_f64(len, |k| b[k]);
    let b_abs = par::sum_f64(len, |k| b[k].abs());
    if b_sum.abs() > 1e-10 * b_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "right-hand side for player {player} is not orthogonal to constants (sum {b_sum:.3e})"
        )));
    }
    let mut rhs = b.to_vec();
    feasible.project_mean_zero(&mut rhs);
    let b_norm = dot(&rhs, &rhs).sqrt();
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; len],
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut x = vec![0.0; len];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; len];
    let mut rr = dot(&r, &r);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        laplacian_f64(graph, &p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        par::for_each_indexed(&mut x, |k, xk| *xk += alpha * p[k]);
        par::for_each_indexed(&mut r, |k, rk| *rk -= alpha * ap[k]);
        feasible.project_mean_zero(&mut x);
        feasible.project_mean_zero(&mut r);
        let rr_next = dot(&r, &r);
        let rel = rr_next.sqrt() / b_norm;
        history.push(rel);
        if rel <= tolerance {
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        rr = rr_next;
        par::for_each_indexed(&mut p, |k, pk| *pk = r[k] + beta * *pk);
    }
    if !converged {
        return Err(Error::Convergence {
            player,
            iterations,
            residual: history.last().copied().unwrap_or(1.0),
            history,
        });
    }

    let shift = x[0];
    par::for_each_indexed(&mut x, |k, xk| {
        if graph.contains_vertex(Coalition::from_bits(k as u32)) {
            *xk -= shift;
        }
    });
    laplacian_f64(graph, &x, &mut ap);
    let true_res = par::sum_f64(len, |k| (ap[k] - b[k]).powi(2)).sqrt() / dot(b, b).sqrt();
    Ok(CgOutcome {
        x,
        iterations,
        residual: true_res,
    })
}
