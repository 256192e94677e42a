//! Parallel vs single-threaded decomposition.
//!
//! "parallel" uses rayon's global pool; "sequential" runs the same call inside
//! a one-thread pool. Building with `--no-default-features` removes rayon
//! from the library entirely, in which case both variants are sequential.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapley_hodge::prelude::*;
use std::hint::black_box;

fn float_game(n: usize) -> Game<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut values = vec![0.0];
    values.extend((1..1usize << n).map(|_| rng.random_range(-1.0..1.0)));
    Game::new(n, values).unwrap()
}

fn rational_game(n: usize) -> Game<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut values = vec![rational(0, 1)];
    values.extend((1..1usize << n).map(|_| rational(rng.random_range(-20..=20), rng.random_range(1..=6))));
    Game::new(n, values).unwrap()
}

fn single_thread() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
}

fn bench_cg(c: &mut Criterion) {
    let pool = single_thread();
    let cfg = SolverConfig::with_backend(Backend::ConjugateGradient);
    let mut group = c.benchmark_group("decompose_cg");
    group.sample_size(10);
    for n in [10, 12, 14] {
        let g = GameGraph::full_hypercube(n, EdgeWeighting::size_plus_one(n)).unwrap();
        let v = float_game(n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| black_box(decompose(&g, &v, &cfg).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| pool.install(|| black_box(decompose(&g, &v, &cfg).unwrap())))
        });
    }
    group.finish();
}

fn bench_exact(c: &mut Criterion) {
    let pool = single_thread();
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("decompose_dense_rational");
    group.sample_size(10);
    for n in [6, 8] {
        let g = GameGraph::full_hypercube(n, EdgeWeighting::unit()).unwrap();
        let solver = Decomposer::new(&g, cfg).unwrap();
        let v = rational_game(n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| black_box(solver.decompose(&v).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| pool.install(|| black_box(solver.decompose(&v).unwrap())))
        });
    }
    group.finish();
}

fn bench_laplacian(c: &mut Criterion) {
    let pool = single_thread();
    let mut group = c.benchmark_group("laplacian_apply");
    let n = 14;
    let g = GameGraph::full_hypercube(n, EdgeWeighting::unit()).unwrap();
    let u = VertexFunction::new(&g, float_game(n).into_values()).unwrap();
    group.bench_function(BenchmarkId::new("parallel", n), |b| b.iter(|| black_box(laplacian_apply(&u))));
    group.bench_function(BenchmarkId::new("sequential", n), |b| {
        b.iter(|| pool.install(|| black_box(laplacian_apply(&u))))
    });
    group.finish();
}

criterion_group!(benches, bench_cg, bench_exact, bench_laplacian);
criterion_main!(benches);
