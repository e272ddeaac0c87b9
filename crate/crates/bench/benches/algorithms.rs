use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wfst::{compose, determinize, minimize, push_weights, DEFAULT_MAX_STATES};
use wfst_bench::{acceptor, deterministic, transducer};

fn bench_compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for n in [8, 32, 128] {
        let (a, b) = (transducer(1, n), transducer(2, n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| compose(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn bench_determinize(c: &mut Criterion) {
    let mut group = c.benchmark_group("determinize");
    for n in [8, 32, 128] {
        let a = acceptor(3, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| determinize(black_box(&a), DEFAULT_MAX_STATES).unwrap())
        });
    }
    group.finish();
}

fn bench_push_and_minimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    for n in [8, 64, 512] {
        let a = deterministic(4, n);
        group.bench_with_input(BenchmarkId::new("push", n), &n, |bench, _| {
            bench.iter(|| push_weights(black_box(&a)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("minimize", n), &n, |bench, _| {
            bench.iter(|| minimize(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_compose,
    bench_determinize,
    bench_push_and_minimize
);
criterion_main!(benches);
