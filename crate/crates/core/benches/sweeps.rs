//! Parallel-vs-sequential comparison of the heavy sweeps. Each target
//! runs once on a single-thread rayon pool (the sequential baseline,
//! including framework overhead) and once on the default pool.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use cairncheck::cairn::{verify_cairn, Cairn, GradedCairn, ProductMeasureCairn};
use cairncheck::hilbert::check_independence_axioms;
use cairncheck::intervals::Chain;
use cairncheck::spectral::{top_eigenvalue, SparseOperator};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        (
            "seq",
            rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap(),
        ),
        ("par", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_interval_suite(c: &mut Criterion) {
    let chain = Chain::new(10);
    let mut group = c.benchmark_group("interval_suite_n8");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| chain.verify(8).unwrap().pass))
        });
    }
    group.finish();
}

fn bench_cairn_verify(c: &mut Criterion) {
    let chain = Arc::new(Chain::new(8));
    let graded = Cairn::Graded(GradedCairn::build(chain, 5, None, 1, 4096).unwrap());
    let mut group = c.benchmark_group("cairn_verify_w5");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| verify_cairn(&graded, 1e-9).unwrap().pass))
        });
    }
    group.finish();
}

fn bench_measure_sweep(c: &mut Criterion) {
    let chain = Chain::new(8);
    let cairn = ProductMeasureCairn::build(&chain, 4, 12).unwrap();
    let mut group = c.benchmark_group("measure_sweep_w4");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| {
                pool.install(|| {
                    cairncheck::cairn::verify_measure_independence(&cairn, &chain)
                        .unwrap()
                        .pass
                })
            })
        });
    }
    group.finish();
}

fn bench_eigensolve(c: &mut Criterion) {
    let op = SparseOperator::cayley(8, 12).unwrap();
    let mut group = c.benchmark_group("eigensolve_r8");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| top_eigenvalue(&op, 1e-9, 20_000, 0).unwrap().value))
        });
    }
    group.finish();
}

fn bench_axiom_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("axiom_suite_1k");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| check_independence_axioms(1000, 12, 0, 1e-8).pass))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_interval_suite,
    bench_cairn_verify,
    bench_measure_sweep,
    bench_eigensolve,
    bench_axiom_suite
);
criterion_main!(benches);
