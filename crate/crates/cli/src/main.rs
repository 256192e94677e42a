//! `hodgeshap`: decompose cooperative games into per-player component games.
//!
//! Exit status: 0 on success, 1 when a `verify` or `fixtures` invariant fails,
//! 2 for unreadable or invalid input, 3 for an infeasible or disconnected
//! graph, 4 when the iterative solver does not converge.

use clap::{Args, Parser, Subcommand, ValueEnum};
use shapley_hodge::closed_form::{
    component_explicit, precedence_shapley_oracle, shapley_direct, shapley_permutation_oracle,
};
use shapley_hodge::fixtures;
use shapley_hodge::game::{DynGame, Game};
use shapley_hodge::graph::{EdgeWeighting, GameGraph};
use shapley_hodge::io::{load_constraints, load_game, load_weights, ConstraintSpec};
use shapley_hodge::prelude::*;
use shapley_hodge::report::{compare_allocations, render_table, Format};
use shapley_hodge::scalar::parse_rational;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hodgeshap", version, about = "Hodge decomposition of cooperative games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every component game v_i as a table.
    Decompose(Input),
    /// Print an allocation vector.
    Shapley {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::Hodge)]
        method: Method,
    },
    /// Compare the Hodge allocation with the precedence and classical Shapley values.
    Compare(Input),
    /// Check efficiency, orthogonality of the residual, and oracle agreement.
    Verify(Input),
    /// Reproduce the six built-in glove-game tables on every backend.
    Fixtures,
}

#[derive(Args)]
struct Input {
    /// Game file (JSON).
    #[arg(long)]
    game: PathBuf,
    /// Removed coalitions/edges and weights (JSON).
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// constant:<c> | size-plus-one | file:<path> | degree-product
    #[arg(long)]
    weights: Option<String>,
    /// Defaults to dense-rational for rational games and cg for float games.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Relative residual tolerance for cg.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap for cg (default 10·2^n).
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    DenseRational,
    DenseFloat,
    Cg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Permutation,
    Hodge,
    Precedence,
}

enum Failure {
    Lib(Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<String, Failure>;

/// A loaded game, its graph, and the solver it should run on.
struct Setup {
    names: Vec<String>,
    game: DynGame,
    graph: GameGraph,
    config: SolverConfig,
    format: Format,
}

fn weighting_from_flag(flag: &str, graph: &GameGraph) -> Result<Option<EdgeWeighting>> {
    let n = graph.players();
    let bad = || Error::Parse {
        location: "--weights".into(),
        message: format!("`{flag}` is not constant:<c>, size-plus-one, file:<path> or degree-product"),
    };
    if flag == "size-plus-one" {
        Ok(Some(EdgeWeighting::size_plus_one(n)))
    } else if flag == "degree-product" {
        Ok(None)
    } else if let Some(c) = flag.strip_prefix("constant:") {
        let c = parse_rational(c).map_err(|e| Error::Parse {
            location: "--weights".into(),
            message: e.to_string(),
        })?;
        Ok(Some(EdgeWeighting::Constant(c)))
    } else if let Some(path) = flag.strip_prefix("file:") {
        load_weights(path, n).map(Some)
    } else {
        Err(bad())
    }
}

fn setup(input: &Input) -> Result<Setup> {
    let spec = load_game(&input.game)?;
    let n = spec.game.players();
    let constraints = match &input.constraints {
        Some(path) => load_constraints(path, n)?,
        None => ConstraintSpec::default(),
    };
    let mut graph = constraints.build_graph(n)?;
    if let Some(flag) = &input.weights {
        graph = match weighting_from_flag(flag, &graph)? {
            Some(w) => graph.with_weighting(w)?,
            None => graph.degree_product_weighting(),
        };
    }
    let backend = match input.backend {
        Some(BackendArg::DenseRational) => Backend::DenseRational,
        Some(BackendArg::DenseFloat) => Backend::DenseFloat,
        Some(BackendArg::Cg) => Backend::ConjugateGradient,
        None => SolverConfig::for_mode(spec.game.mode()).backend,
    };
    let mut config = SolverConfig::with_backend(backend);
    if let Some(tol) = input.tol {
        config.cg_tolerance = tol;
    }
    config.cg_max_iters = input.max_iters;
    config.validate()?;
    // the backend decides the arithmetic
    let game = match (backend.mode(), spec.game) {
        (ScalarMode::Rational, DynGame::Float(g)) => DynGame::Rational(g.to_rational()),
        (ScalarMode::Float, DynGame::Rational(g)) => DynGame::Float(g.to_float()),
        (_, g) => g,
    };
    Ok(Setup {
        names: spec.names,
        game,
        graph,
        config,
        format: match input.format {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
    })
}

fn run_decompose<T: Scalar>(s: &Setup, v: &Game<T>) -> Outcome {
    let d = decompose(&s.graph, v, &s.config)?;
    for diag in d.diagnostics().iter().filter(|d| d.iterations > 0) {
        eprintln!(
            "player {}: {} iterations, relative residual {:.3e}",
            diag.player, diag.iterations, diag.residual
        );
    }
    Ok(render_table(&s.graph, &d, v, Some(&s.names), s.format)?)
}

fn run_shapley<T: Scalar>(s: &Setup, v: &Game<T>, method: Method) -> Outcome {
    let n = v.players();
    let allocation: Vec<T> = match method {
        Method::Hodge => decompose(&s.graph, v, &s.config)?.allocation(),
        Method::Direct => (0..n).map(|i| shapley_direct(v, PlayerId(i))).collect::<Result<_>>()?,
        Method::Permutation => (0..n)
            .map(|i| shapley_permutation_oracle(v, PlayerId(i)))
            .collect::<Result<_>>()?,
        Method::Precedence => (0..n)
            .map(|i| precedence_shapley_oracle(&s.graph, v, PlayerId(i)))
            .collect::<Result<_>>()?,
    };
    let rendered: Vec<String> = allocation.iter().map(Scalar::render).collect();
    Ok(match s.format {
        Format::Text => format!("({})\n", rendered.join(", ")),
        Format::Csv => {
            let mut out = String::from("player,value\n");
            for (name, x) in s.names.iter().zip(&rendered) {
                out.push_str(&format!("{name},{x}\n"));
            }
            out
        }
        Format::Json => {
            let method = match method {
                Method::Direct => "direct",
                Method::Permutation => "permutation",
                Method::Hodge => "hodge",
                Method::Precedence => "precedence",
            };
            format!("{{\"method\":\"{method}\",\"allocation\":[{}]}}\n", rendered
                .iter()
                .map(|x| format!("\"{x}\""))
                .collect::<Vec<_>>()
                .join(","))
        }
    })
}

fn run_compare<T: Scalar>(s: &Setup, v: &Game<T>) -> Outcome {
    Ok(compare_allocations(&s.graph, v, &s.config)?.render(Some(&s.names), s.format))
}

fn run_verify<T: Scalar>(s: &Setup, v: &Game<T>) -> Outcome {
    // float checks are relative to the size of the game
    let tol = 1e-8;
    let scale = v.sup_norm();
    let d = decompose(&s.graph, v, &s.config)?;
    let mut checks: Vec<(String, bool, String)> = Vec::new();

    let defect = d.efficiency_defect(&s.graph, v);
    checks.push((
        "efficiency".into(),
        defect.is_negligible(tol, scale),
        format!("max |Σ v_i(S) − v(S)| = {}", defect.render()),
    ));
    let ortho = residual_orthogonality(&s.graph, v, &d)?;
    let worst = ortho.iter().cloned().fold(T::zero(), |a, b| if b > a { b } else { a });
    checks.push((
        "residual orthogonality".into(),
        worst.is_negligible(tol, scale),
        format!("max |d*_w(d v_i − d_i v)| = {}", worst.render()),
    ));
    if s.graph.is_full() && s.graph.is_permutation_invariant() {
        let mut gap = T::zero();
        for (i, x) in d.allocation().iter().enumerate() {
            let diff = (x.clone() - shapley_direct(v, PlayerId(i))?).abs();
            if diff > gap {
                gap = diff;
            }
        }
        checks.push((
            "allocation = Shapley value".into(),
            gap.is_negligible(tol, scale),
            format!("max gap {}", gap.render()),
        ));
    }
    if s.graph.is_full() && s.graph.has_constant_weights() {
        let mut gap = T::zero();
        for i in 0..v.players() {
            let explicit = component_explicit(&s.graph, v, PlayerId(i))?;
            for (a, b) in explicit.values().iter().zip(d.component(PlayerId(i)).values()) {
                let diff = (a.clone() - b.clone()).abs();
                if diff > gap {
                    gap = diff;
                }
            }
        }
        checks.push((
            "components = Green's-function formula".into(),
            gap.is_negligible(tol, scale),
            format!("max gap {}", gap.render()),
        ));
    }
    let mut out = String::new();
    for (name, ok, detail) in &checks {
        out.push_str(&format!("{} {name}: {detail}\n", if *ok { "PASS" } else { "FAIL" }));
    }
    if checks.iter().all(|c| c.1) {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Invariant("verification failed".into()))
    }
}

fn run_fixtures() -> Outcome {
    let all = fixtures::all();
    let mut out = String::new();
    let mut reproduced = 0;
    for f in &all {
        let mut ok = true;
        let mut summary = Vec::new();
        for backend in [Backend::DenseRational, Backend::DenseFloat, Backend::ConjugateGradient] {
            let r = fixtures::check(f, backend, 1e-9)?;
            summary.push(format!("{} {}/{}", backend, r.matched, r.total));
            for m in &r.mismatches {
                eprintln!("mismatch ({backend}): {m}");
            }
            ok &= r.passed();
        }
        if ok {
            reproduced += 1;
        }
        out.push_str(&format!(
            "table {} [{}] {}: {}\n",
            f.table,
            if ok { "ok" } else { "MISMATCH" },
            f.title,
            summary.join(", ")
        ));
    }
    out.push_str(&format!("{reproduced}/{} tables reproduced\n", all.len()));
    if reproduced == all.len() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Invariant("fixture mismatch".into()))
    }
}

fn dispatch(cli: Cli) -> Outcome {
    macro_rules! on_game {
        ($setup:expr, $f:ident $(, $arg:expr)*) => {
            match &$setup.game {
                DynGame::Rational(v) => $f(&$setup, v $(, $arg)*),
                DynGame::Float(v) => $f(&$setup, v $(, $arg)*),
            }
        };
    }
    match cli.command {
        Command::Decompose(input) => {
            let s = setup(&input)?;
            on_game!(s, run_decompose)
        }
        Command::Shapley { input, method } => {
            let s = setup(&input)?;
            on_game!(s, run_shapley, method)
        }
        Command::Compare(input) => {
            let s = setup(&input)?;
            on_game!(s, run_compare)
        }
        Command::Verify(input) => {
            let s = setup(&input)?;
            on_game!(s, run_verify)
        }
        Command::Fixtures => run_fixtures(),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 3,
        Error::Convergence { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
