//! Tables of component games and side-by-side allocation comparisons.

use crate::closed_form::{precedence_shapley_oracle, shapley_direct};
use crate::coalition::{Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::GameGraph;
use crate::scalar::Scalar;
use crate::solve::{decompose, Decomposition, SolverConfig};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Validation(format!("unknown format `{other}` (text, csv, json)"))),
        }
    }
}

/// Feasible coalitions ordered by size, then by bitset value.
pub fn table_order(g: &GameGraph) -> Vec<Coalition> {
    let mut rows: Vec<Coalition> = g.feasible_vertices().collect();
    rows.sort_by_key(|s| (s.len(), s.bits()));
    rows
}

fn label(s: Coalition, names: Option<&[String]>) -> String {
    match names {
        Some(_) if s.is_empty() => "∅".to_string(),
        Some(names) => s.display_with(names),
        None => s.to_string(),
    }
}

fn tabulate(header: &[String], body: &[Vec<String>]) -> String {
    let cols = header.len();
    let width: Vec<usize> = (0..cols)
        .map(|c| {
            body.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let mut out = String::new();
        for (c, cell) in cells.iter().enumerate() {
            let pad = width[c] - cell.chars().count();
            if c == 0 {
                out.push_str(cell);
                out.extend(std::iter::repeat_n(' ', pad));
            } else {
                out.push_str("  ");
                out.extend(std::iter::repeat_n(' ', pad));
                out.push_str(cell);
            }
        }
        out.trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    let rule: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// Renders `v` and its component games, one row per feasible coalition.
///
/// The components are re-checked to sum to `v` in every row before
/// anything is written. `names` switches coalition labels to `{a,b}` form.
pub fn render_table<T: Scalar>(
    g: &GameGraph,
    d: &Decomposition<T>,
    v: &Game<T>,
    names: Option<&[String]>,
    format: Format,
) -> Result<String> {
    let n = v.players();
    if d.players() != n || g.players() != n {
        return Err(Error::Domain("decomposition, game and graph disagree on the player count".into()));
    }
    let rows = table_order(g);
    for &s in &rows {
        let total: T = d.components().iter().map(|c| c.value(s).clone()).sum();
        if !(total - v.value(s).clone()).is_negligible(crate::game::FLOAT_GAME_TOLERANCE, v.sup_norm()) {
            return Err(Error::Domain(format!("components do not sum to v at coalition {s}")));
        }
    }
    let cells = |s: Coalition| -> Vec<String> {
        std::iter::once(v.value(s).render())
            .chain(d.components().iter().map(|c| c.value(s).render()))
            .collect()
    };
    let allocation: Vec<String> = d.allocation().iter().map(Scalar::render).collect();
    let columns: Vec<String> = std::iter::once("v".to_string())
        .chain((1..=n).map(|k| format!("v_{k}")))
        .collect();
    Ok(match format {
        Format::Text => {
            let header: Vec<String> = std::iter::once("S".to_string()).chain(columns).collect();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&s| std::iter::once(label(s, names)).chain(cells(s)).collect())
                .collect();
            let mut out = tabulate(&header, &body);
            let _ = writeln!(out, "allocation v_i(N): ({})", allocation.join(", "));
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<String> = std::iter::once("coalition".to_string()).chain(columns).collect();
            w.write_record(&header).map_err(|e| Error::Domain(e.to_string()))?;
            for &s in &rows {
                let record: Vec<String> = std::iter::once(label(s, names)).chain(cells(s)).collect();
                w.write_record(&record).map_err(|e| Error::Domain(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Domain(e.to_string()))?)
                .expect("csv output is utf-8")
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|&s| {
                    let mut c = cells(s).into_iter();
                    json!({
                        "coalition": s.members().map(|p| p.0).collect::<Vec<_>>(),
                        "v": c.next(),
                        "components": c.collect::<Vec<_>>(),
                    })
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&json!({ "rows": rows, "allocation": allocation }))
                .expect("json values serialize");
            out.push('\n');
            out
        }
    })
}

/// One player's payoff under each applicable rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow<T> {
    pub player: PlayerId,
    pub hodge: T,
    /// Average over feasible orderings; only on restricted graphs.
    pub precedence: Option<T>,
    /// Classical Shapley value; only on the full hypercube.
    pub shapley: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationComparison<T> {
    pub rows: Vec<ComparisonRow<T>>,
}

/// Hodge allocation `v_i(N)` next to the precedence and classical Shapley values.
pub fn compare_allocations<T: Scalar>(
    g: &GameGraph,
    v: &Game<T>,
    config: &SolverConfig,
) -> Result<AllocationComparison<T>> {
    let hodge = decompose(g, v, config)?.allocation();
    let rows = hodge
        .into_iter()
        .enumerate()
        .map(|(i, h)| {
            let p = PlayerId(i);
            Ok(ComparisonRow {
                player: p,
                hodge: h,
                precedence: if g.is_full() {
                    None
                } else {
                    Some(precedence_shapley_oracle(g, v, p)?)
                },
                shapley: if g.is_full() { Some(shapley_direct(v, p)?) } else { None },
            })
        })
        .collect::<Result<_>>()?;
    Ok(AllocationComparison { rows })
}

impl<T: Scalar> AllocationComparison<T> {
    pub fn hodge(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.hodge.clone()).collect()
    }

    /// Largest `|hodge − other|` over players and available rules.
    pub fn max_gap(&self) -> T {
        self.rows
            .iter()
            .flat_map(|r| {
                [&r.precedence, &r.shapley]
                    .into_iter()
                    .flatten()
                    .map(|x| (r.hodge.clone() - x.clone()).abs())
            })
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn render(&self, names: Option<&[String]>, format: Format) -> String {
        let name = |p: PlayerId| match names {
            Some(ns) => ns.get(p.0).cloned().unwrap_or_else(|| p.to_string()),
            None => p.to_string(),
        };
        let opt = |x: &Option<T>| x.as_ref().map(Scalar::render);
        let gap = |x: &Option<T>, h: &T| x.as_ref().map(|x| (h.clone() - x.clone()).abs().render());
        let mut header = vec!["player".to_string(), "hodge".to_string()];
        let has_prec = self.rows.iter().any(|r| r.precedence.is_some());
        let has_shap = self.rows.iter().any(|r| r.shapley.is_some());
        if has_prec {
            header.extend(["precedence".into(), "|hodge-precedence|".into()]);
        }
        if has_shap {
            header.extend(["shapley".into(), "|hodge-shapley|".into()]);
        }
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![name(r.player), r.hodge.render()];
                if has_prec {
                    row.push(opt(&r.precedence).unwrap_or_default());
                    row.push(gap(&r.precedence, &r.hodge).unwrap_or_default());
                }
                if has_shap {
                    row.push(opt(&r.shapley).unwrap_or_default());
                    row.push(gap(&r.shapley, &r.hodge).unwrap_or_default());
                }
                row
            })
            .collect();
        match format {
            Format::Text => tabulate(&header, &body),
            Format::Csv => {
                let mut out = header.join(",");
                out.push('\n');
                for row in body {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "player": r.player.0,
                            "hodge": r.hodge.render(),
                            "precedence": opt(&r.precedence),
                            "shapley": opt(&r.shapley),
                        })
                    })
                    .collect();
                let mut out = serde_json::to_string_pretty(&json!({ "players": rows })).expect("json values serialize");
                out.push('\n');
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_glove_game;
    use crate::graph::EdgeWeighting;
    use crate::scalar::{parse_rational, rational, Rational};

    fn q3() -> GameGraph {
        GameGraph::full_hypercube(3, EdgeWeighting::unit()).unwrap()
    }

    fn names() -> Vec<String> {
        (1..=3).map(|k| k.to_string()).collect()
    }

    #[test]
    fn glove_text_table() {
        let g = q3();
        let v = make_glove_game();
        let d = decompose(&g, &v, &SolverConfig::default()).unwrap();
        let text = render_table(&g, &d, &v, Some(&names()), Format::Text).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 + 8 + 1);
        assert!(lines[0].starts_with("S"));
        assert!(lines[2].starts_with("∅"));
        assert!(lines[3].starts_with("{1}") && lines[3].contains("5/12") && lines[3].contains("-5/24"));
        assert!(lines[9].starts_with("{1,2,3}"));
        assert!(lines[10].ends_with("(2/3, 1/6, 1/6)"));
    }

    #[test]
    fn restricted_table_has_seven_rows() {
        let g = q3().restrict(&[Coalition::singleton(PlayerId(1))], &[]).unwrap();
        let v = make_glove_game();
        let d = decompose(&g, &v, &SolverConfig::default()).unwrap();
        let csv = render_table(&g, &d, &v, None, Format::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "coalition,v,v_1,v_2,v_3");
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[7], "\"[0,1,2]\",1,1/2,3/10,1/5");
    }

    #[test]
    fn json_round_trip() {
        let g = q3();
        let v = make_glove_game();
        let d = decompose(&g, &v, &SolverConfig::default()).unwrap();
        let doc: Value = serde_json::from_str(&render_table(&g, &d, &v, None, Format::Json).unwrap()).unwrap();
        let rows = doc["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 8);
        for row in rows {
            let s = Coalition::from_members(row["coalition"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize));
            assert_eq!(parse_rational(row["v"].as_str().unwrap()).unwrap(), *v.value(s));
            for (i, c) in row["components"].as_array().unwrap().iter().enumerate() {
                assert_eq!(parse_rational(c.as_str().unwrap()).unwrap(), *d.component(PlayerId(i)).value(s));
            }
        }
        let alloc: Vec<Rational> = doc["allocation"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| parse_rational(x.as_str().unwrap()).unwrap())
            .collect();
        assert_eq!(alloc, d.allocation());
    }

    #[test]
    fn zero_game_and_inconsistent_input() {
        let g = q3();
        let v = Game::<Rational>::zero(3).unwrap();
        let d = decompose(&g, &v, &SolverConfig::default()).unwrap();
        let csv = render_table(&g, &d, &v, None, Format::Csv).unwrap();
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",0,0,0,0")));
        let glove = make_glove_game();
        assert!(render_table(&g, &d, &glove, None, Format::Text).is_err());
    }

    #[test]
    fn comparisons() {
        let v = make_glove_game();
        let cfg = SolverConfig::default();
        let restricted = q3().restrict(&[Coalition::singleton(PlayerId(1))], &[]).unwrap();
        let cmp = compare_allocations(&restricted, &v, &cfg).unwrap();
        assert_eq!(cmp.hodge(), vec![rational(1, 2), rational(3, 10), rational(1, 5)]);
        let prec: Vec<Rational> = cmp.rows.iter().map(|r| r.precedence.clone().unwrap()).collect();
        assert_eq!(prec, vec![rational(1, 2), rational(1, 4), rational(1, 4)]);
        assert_eq!(cmp.max_gap(), rational(1, 20));
        let text = cmp.render(Some(&names()), Format::Text);
        assert!(text.contains("precedence") && !text.contains("shapley"));

        let degree = restricted.degree_product_weighting();
        let cmp = compare_allocations(&degree, &v, &cfg).unwrap();
        assert_eq!(cmp.hodge(), vec![rational(1, 2), rational(1, 4), rational(1, 4)]);

        let cmp = compare_allocations(&q3(), &v, &cfg).unwrap();
        assert_eq!(cmp.max_gap(), rational(0, 1));
        let doc: Value = serde_json::from_str(&cmp.render(None, Format::Json)).unwrap();
        assert_eq!(doc["players"][0]["shapley"], "2/3");
    }
}
