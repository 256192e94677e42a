//! JSON game and constraint files.
//!
//! Game file:
//!
//! ```json
//! { "players": ["L", "R1", "R2"], "mode": "rational",
//!   "values": { "[0,1]": "1", "[0,2]": "1", "[0,1,2]": "1" } }
//! ```
//!
//! Unlisted coalitions are worth 0. Rational values are `"p/q"` or integer
//! strings; float values are JSON numbers.
//!
//! Constraint file (every key optional):
//!
//! ```json
//! { "removed_coalitions": ["[1]"],
//!   "removed_edges": [{ "base": "[]", "player": 1 }],
//!   "weights": { "kind": "explicit", "entries": [{ "base": "[]", "player": 0, "w": "1/2" }] } }
//! ```
//!
//! Weights are `{"kind":"constant","value":"1"}`,
//! `{"kind":"by_cardinality","values":["1","2","3"]}`, or `explicit` as above
//! (unlisted edges weigh 1).

use crate::coalition::{Coalition, PlayerId, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::game::{DynGame, Game};
use crate::graph::{Edge, EdgeWeighting, GameGraph};
use crate::scalar::{parse_rational, Rational, Scalar, ScalarMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

/// A parsed game file.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub names: Vec<String>,
    pub game: DynGame,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: Vec<String>,
    mode: String,
    #[serde(default)]
    values: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    #[serde(default)]
    removed_coalitions: Vec<String>,
    #[serde(default)]
    removed_edges: Vec<EdgeEntry>,
    #[serde(default)]
    weights: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    base: String,
    player: usize,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum WeightsFile {
    Constant { value: String },
    ByCardinality { values: Vec<String> },
    Explicit { entries: Vec<WeightEntry> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightEntry {
    base: String,
    player: usize,
    w: String,
}

fn syntax(source: &str, e: serde_json::Error) -> Error {
    Error::parse(format!("{source}:{}:{}", e.line(), e.column()), e.to_string())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn coalition_at(source: &str, field: &str, text: &str, n: usize) -> Result<Coalition> {
    let s: Coalition = text
        .parse()
        .map_err(|e: Error| Error::parse(format!("{source}: {field}"), e.to_string()))?;
    if s.bits() >> n != 0 {
        return Err(Error::parse(
            format!("{source}: {field}"),
            format!("coalition {text} names a player outside 0..{n}"),
        ));
    }
    Ok(s)
}

fn rational_at(source: &str, field: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| Error::parse(format!("{source}: {field}"), e.to_string()))
}

fn edge_at(source: &str, field: &str, base: &str, player: usize, n: usize) -> Result<Edge> {
    let base = coalition_at(source, &format!("{field}.base"), base, n)?;
    if player >= n {
        return Err(Error::parse(
            format!("{source}: {field}.player"),
            format!("player {player} is outside 0..{n}"),
        ));
    }
    Edge::new(base, PlayerId(player)).map_err(|e| Error::parse(format!("{source}: {field}"), e.to_string()))
}

/// Parses a game file's contents; `source` names it in error locations.
pub fn parse_game(text: &str, source: &str) -> Result<GameSpec> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| syntax(source, e))?;
    let n = file.players.len();
    if n == 0 || n > MAX_PLAYERS {
        return Err(Error::parse(
            format!("{source}: players"),
            format!("need between 1 and {MAX_PLAYERS} players, got {n}"),
        ));
    }
    let mode = match file.mode.as_str() {
        "rational" => ScalarMode::Rational,
        "float" => ScalarMode::Float,
        other => {
            return Err(Error::parse(
                format!("{source}: mode"),
                format!("expected \"rational\" or \"float\", got \"{other}\""),
            ))
        }
    };
    let mut seen = BTreeMap::new();
    for (key, value) in &file.values {
        let field = format!("values.{key}");
        let s = coalition_at(source, &field, key, n)?;
        if let Some(prev) = seen.insert(s, (key.clone(), value.clone())) {
            return Err(Error::parse(
                format!("{source}: {field}"),
                format!("coalition listed twice (also as {})", prev.0),
            ));
        }
    }
    let game = match mode {
        ScalarMode::Rational => DynGame::Rational(build_game(n, &seen, source, |field, v| match v {
            Value::String(s) => rational_at(source, field, s),
            Value::Number(k) if k.is_i64() => Ok(Rational::from_i64(k.as_i64().unwrap_or_default())),
            other => Err(Error::parse(
                format!("{source}: {field}"),
                format!("rational values must be \"p/q\" or integer strings, got {other}"),
            )),
        })?),
        ScalarMode::Float => DynGame::Float(build_game(n, &seen, source, |field, v| {
            v.as_f64().ok_or_else(|| {
                Error::parse(format!("{source}: {field}"), format!("float values must be JSON numbers, got {v}"))
            })
        })?),
    };
    Ok(GameSpec {
        names: file.players,
        game,
    })
}

fn build_game<T: Scalar>(
    n: usize,
    entries: &BTreeMap<Coalition, (String, Value)>,
    source: &str,
    convert: impl Fn(&str, &Value) -> Result<T>,
) -> Result<Game<T>> {
    let mut values = vec![T::zero(); 1 << n];
    for (s, (key, raw)) in entries {
        let field = format!("values.{key}");
        let x = convert(&field, raw)?;
        x.check().map_err(|e| Error::parse(format!("{source}: {field}"), e.to_string()))?;
        if s.is_empty() && !x.is_zero() {
            return Err(Error::parse(
                format!("{source}: {field}"),
                "the empty coalition must be worth 0",
            ));
        }
        values[s.index()] = x;
    }
    Game::new(n, values)
}

pub fn load_game(path: impl AsRef<Path>) -> Result<GameSpec> {
    let path = path.as_ref();
    parse_game(&read(path)?, &path.display().to_string())
}

/// Serializes a game in the file format accepted by [`parse_game`]; zero
/// values are omitted.
pub fn game_to_json(names: &[String], game: &DynGame) -> String {
    fn entries<T: Scalar>(g: &Game<T>, to_json: impl Fn(&T) -> Value) -> BTreeMap<String, Value> {
        (0..g.values().len() as u32)
            .map(Coalition::from_bits)
            .filter(|&s| !g.value(s).is_zero())
            .map(|s| (s.to_string(), to_json(g.value(s))))
            .collect()
    }
    let values = match game {
        DynGame::Rational(g) => entries(g, |x| Value::String(x.render())),
        DynGame::Float(g) => entries(g, |x| serde_json::json!(x)),
    };
    let file = GameFile {
        players: names.to_vec(),
        mode: game.mode().to_string(),
        values,
    };
    serde_json::to_string_pretty(&file).expect("game files always serialize")
}

/// A parsed constraint file: removals plus an optional weighting.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintSpec {
    pub removed_coalitions: Vec<Coalition>,
    pub removed_edges: Vec<Edge>,
    pub weights: Option<EdgeWeighting>,
}

impl ConstraintSpec {
    /// The restricted, reweighted `n`-cube; unit weights when none are given.
    pub fn build_graph(&self, n: usize) -> Result<GameGraph> {
        let weighting = self.weights.clone().unwrap_or_else(EdgeWeighting::unit);
        GameGraph::full_hypercube(n, weighting)?.restrict(&self.removed_coalitions, &self.removed_edges)
    }
}

/// Parses a constraint file for an `n`-player game.
pub fn parse_constraints(text: &str, source: &str, n: usize) -> Result<ConstraintSpec> {
    let file: ConstraintFile = serde_json::from_str(text).map_err(|e| syntax(source, e))?;
    let removed_coalitions = file
        .removed_coalitions
        .iter()
        .enumerate()
        .map(|(k, s)| coalition_at(source, &format!("removed_coalitions[{k}]"), s, n))
        .collect::<Result<_>>()?;
    let removed_edges = file
        .removed_edges
        .iter()
        .enumerate()
        .map(|(k, e)| edge_at(source, &format!("removed_edges[{k}]"), &e.base, e.player, n))
        .collect::<Result<_>>()?;
    let weights = file
        .weights
        .map(|w| weights_from_value(w, source, "weights", n))
        .transpose()?;
    Ok(ConstraintSpec {
        removed_coalitions,
        removed_edges,
        weights,
    })
}

pub fn load_constraints(path: impl AsRef<Path>, n: usize) -> Result<ConstraintSpec> {
    let path = path.as_ref();
    parse_constraints(&read(path)?, &path.display().to_string(), n)
}

/// Parses a standalone weights object (`{"kind": ...}`).
pub fn parse_weights(text: &str, source: &str, n: usize) -> Result<EdgeWeighting> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax(source, e))?;
    weights_from_value(value, source, "", n)
}

pub fn load_weights(path: impl AsRef<Path>, n: usize) -> Result<EdgeWeighting> {
    let path = path.as_ref();
    parse_weights(&read(path)?, &path.display().to_string(), n)
}

fn weights_from_value(value: Value, source: &str, field: &str, n: usize) -> Result<EdgeWeighting> {
    let sub = |rest: &str| {
        if field.is_empty() {
            rest.to_string()
        } else {
            format!("{field}.{rest}")
        }
    };
    let file: WeightsFile = serde_json::from_value(value)
        .map_err(|e| Error::parse(format!("{source}: {}", if field.is_empty() { "weights" } else { field }), e.to_string()))?;
    match file {
        WeightsFile::Constant { value } => Ok(EdgeWeighting::Constant(rational_at(source, &sub("value"), &value)?)),
        WeightsFile::ByCardinality { values } => {
            if values.len() != n {
                return Err(Error::parse(
                    format!("{source}: {}", sub("values")),
                    format!("need one weight per cardinality 0..{n}, got {}", values.len()),
                ));
            }
            values
                .iter()
                .enumerate()
                .map(|(k, w)| rational_at(source, &sub(&format!("values[{k}]")), w))
                .collect::<Result<_>>()
                .map(EdgeWeighting::ByCardinality)
        }
        WeightsFile::Explicit { entries } => {
            let mut map = BTreeMap::new();
            for (k, e) in entries.iter().enumerate() {
                let at = sub(&format!("entries[{k}]"));
                let edge = edge_at(source, &at, &e.base, e.player, n)?;
                let w = rational_at(source, &format!("{at}.w"), &e.w)?;
                if map.insert(edge, w).is_some() {
                    return Err(Error::parse(format!("{source}: {at}"), format!("edge {edge} listed twice")));
                }
            }
            Ok(EdgeWeighting::Explicit(map))
        }
    }
}
