//! The six reference decompositions of the three-player glove game, with
//! expected component values as exact fractions.
//!
//! Row labels below use the 1-indexed player names `1, 2, 3`; player `k` is
//! internal index `k − 1`.

use crate::coalition::{Coalition, PlayerId};
use crate::error::Result;
use crate::game::{make_glove_game, Game};
use crate::graph::{Edge, EdgeWeighting, GameGraph};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::solve::{decompose, Backend, SolverConfig};
use std::collections::BTreeMap;

/// One reference table: a graph, the glove game, and every expected `v_i(S)`.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub table: usize,
    pub title: &'static str,
    pub graph: GameGraph,
    pub game: Game<Rational>,
    /// `(S, [v_1(S), v_2(S), v_3(S)])` for every feasible `S`, `∅` included.
    pub expected: Vec<(Coalition, Vec<Rational>)>,
}

/// Player names matching the row labels.
pub fn player_names() -> Vec<String> {
    (1..=3).map(|k| k.to_string()).collect()
}

fn labelled(members: &[usize]) -> Coalition {
    Coalition::from_members(members.iter().map(|k| k - 1))
}

fn rows(data: &[(&[usize], [&str; 3])]) -> Vec<(Coalition, Vec<Rational>)> {
    std::iter::once((Coalition::EMPTY, vec![Rational::from_i64(0); 3]))
        .chain(data.iter().map(|(s, vals)| {
            let vals = vals
                .iter()
                .map(|x| parse_rational(x).expect("fixture literals are valid"))
                .collect();
            (labelled(s), vals)
        }))
        .collect()
}

fn cube(weighting: EdgeWeighting) -> GameGraph {
    GameGraph::full_hypercube(3, weighting).expect("the 3-cube is valid")
}

fn without_player_two() -> GameGraph {
    cube(EdgeWeighting::unit())
        .restrict(&[labelled(&[2])], &[])
        .expect("removing {2} keeps the cube connected")
}

/// All six tables in order.
pub fn all() -> Vec<Fixture> {
    let glove = make_glove_game();
    let mut reluctant = BTreeMap::new();
    reluctant.insert(
        Edge::new(Coalition::EMPTY, PlayerId(0)).expect("valid edge"),
        parse_rational("1/2").expect("valid literal"),
    );
    vec![
        Fixture {
            table: 1,
            title: "glove game, unweighted hypercube",
            graph: cube(EdgeWeighting::unit()),
            game: glove.clone(),
            expected: rows(&[
                (&[1], ["5/12", "-5/24", "-5/24"]),
                (&[2], ["-5/24", "1/6", "1/24"]),
                (&[3], ["-5/24", "1/24", "1/6"]),
                (&[1, 2], ["5/8", "3/8", "0"]),
                (&[1, 3], ["5/8", "0", "3/8"]),
                (&[2, 3], ["-1/4", "1/8", "1/8"]),
                (&[1, 2, 3], ["2/3", "1/6", "1/6"]),
            ]),
        },
        Fixture {
            table: 2,
            title: "glove game, edge weights |S| + 1",
            graph: cube(EdgeWeighting::size_plus_one(3)),
            game: glove.clone(),
            expected: rows(&[
                (&[1], ["16/31", "-8/31", "-8/31"]),
                (&[2], ["-8/31", "6/31", "2/31"]),
                (&[3], ["-8/31", "2/31", "6/31"]),
                (&[1, 2], ["20/31", "21/62", "1/62"]),
                (&[1, 3], ["20/31", "1/62", "21/62"]),
                (&[2, 3], ["-9/31", "9/62", "9/62"]),
                (&[1, 2, 3], ["2/3", "1/6", "1/6"]),
            ]),
        },
        Fixture {
            table: 3,
            title: "glove game, player 1 reluctant to act alone (w(∅,{1}) = 1/2)",
            graph: cube(EdgeWeighting::Explicit(reluctant)),
            game: glove.clone(),
            expected: rows(&[
                (&[1], ["10/17", "-5/17", "-5/17"]),
                (&[2], ["-5/34", "37/272", "3/272"]),
                (&[3], ["-5/34", "3/272", "37/272"]),
                (&[1, 2], ["25/34", "87/272", "-15/272"]),
                (&[1, 3], ["25/34", "-15/272", "87/272"]),
                (&[2, 3], ["-3/17", "3/34", "3/34"]),
                (&[1, 2, 3], ["13/17", "2/17", "2/17"]),
            ]),
        },
        Fixture {
            table: 4,
            title: "glove game, coalition {1} infeasible",
            graph: cube(EdgeWeighting::unit())
                .restrict(&[labelled(&[1])], &[])
                .expect("removing {1} keeps the cube connected"),
            game: glove.clone(),
            expected: rows(&[
                (&[2], ["0", "0", "0"]),
                (&[3], ["0", "0", "0"]),
                (&[1, 2], ["1", "0", "0"]),
                (&[1, 3], ["1", "0", "0"]),
                (&[2, 3], ["0", "0", "0"]),
                (&[1, 2, 3], ["1", "0", "0"]),
            ]),
        },
        Fixture {
            table: 5,
            title: "glove game, coalition {2} infeasible",
            graph: without_player_two(),
            game: glove.clone(),
            expected: rows(&[
                (&[1], ["3/10", "-1/10", "-1/5"]),
                (&[3], ["-3/10", "1/10", "1/5"]),
                (&[1, 2], ["2/5", "3/5", "0"]),
                (&[1, 3], ["1/2", "1/10", "2/5"]),
                (&[2, 3], ["-2/5", "1/5", "1/5"]),
                (&[1, 2, 3], ["1/2", "3/10", "1/5"]),
            ]),
        },
        Fixture {
            table: 6,
            title: "glove game, coalition {2} infeasible, degree-product weights",
            graph: without_player_two().degree_product_weighting(),
            game: glove,
            expected: rows(&[
                (&[1], ["1/3", "-1/12", "-1/4"]),
                (&[3], ["-1/3", "1/12", "1/4"]),
                (&[1, 2], ["5/12", "7/12", "0"]),
                (&[1, 3], ["1/2", "1/12", "5/12"]),
                (&[2, 3], ["-5/12", "1/6", "1/4"]),
                (&[1, 2, 3], ["1/2", "1/4", "1/4"]),
            ]),
        },
    ]
}

/// Result of checking one fixture against one backend.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub table: usize,
    pub backend: Backend,
    pub matched: usize,
    pub total: usize,
    /// Human-readable description of each mismatching entry.
    pub mismatches: Vec<String>,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Decomposes the fixture with `backend` and compares every entry: exactly
/// for `DenseRational`, within `float_tol` absolute for the float backends.
pub fn check(fixture: &Fixture, backend: Backend, float_tol: f64) -> Result<FixtureOutcome> {
    let config = SolverConfig::with_backend(backend);
    let components: Vec<Game<Rational>> = match backend {
        Backend::DenseRational => decompose(&fixture.graph, &fixture.game, &config)?.components().to_vec(),
        _ => decompose(&fixture.graph, &fixture.game.to_float(), &config)?
            .components()
            .iter()
            .map(Game::to_rational)
            .collect(),
    };
    let mut outcome = FixtureOutcome {
        table: fixture.table,
        backend,
        matched: 0,
        total: 0,
        mismatches: Vec::new(),
    };
    let names = player_names();
    for (s, expected) in &fixture.expected {
        for (i, want) in expected.iter().enumerate() {
            outcome.total += 1;
            let got = components[i].value(*s);
            let ok = match backend {
                Backend::DenseRational => got == want,
                _ => (got.to_f64() - want.to_f64()).abs() <= float_tol,
            };
            if ok {
                outcome.matched += 1;
            } else {
                outcome.mismatches.push(format!(
                    "table {} v_{}({}) = {}, expected {}",
                    fixture.table,
                    i + 1,
                    s.display_with(&names),
                    got.render(),
                    want.render()
                ));
            }
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_reproduces_exactly() {
        for f in all() {
            let out = check(&f, Backend::DenseRational, 0.0).unwrap();
            assert!(out.passed(), "{:?}", out.mismatches);
            assert_eq!(out.total, 3 * f.graph.vertex_count());
        }
    }

    #[test]
    fn float_backends_agree() {
        for f in all() {
            for backend in [Backend::DenseFloat, Backend::ConjugateGradient] {
                let out = check(&f, backend, 1e-9).unwrap();
                assert!(out.passed(), "{:?}", out.mismatches);
            }
        }
    }

    #[test]
    fn expected_rows_cover_feasible_vertices() {
        for f in all() {
            let listed: Vec<Coalition> = f.expected.iter().map(|(s, _)| *s).collect();
            let mut feasible: Vec<Coalition> = f.graph.feasible_vertices().collect();
            let mut sorted = listed.clone();
            sorted.sort();
            feasible.sort();
            assert_eq!(sorted, feasible, "table {}", f.table);
        }
    }
}
