use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use finsler_bench::fixtures;
use finsler_core::curvature::{curvature_bounds, hsc, hsc_origin};

fn pointwise(c: &mut Criterion) {
    let mut group = c.benchmark_group("pointwise");
    for f in fixtures() {
        group.bench_with_input(BenchmarkId::new("eval", f.name), &f, |b, f| {
            b.iter(|| f.metric.eval(black_box(&f.z), black_box(&f.v)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fundamental_tensor", f.name), &f, |b, f| {
            b.iter(|| f.metric.fundamental_tensor(black_box(&f.z), black_box(&f.v)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("automorphism", f.name), &f, |b, f| {
            b.iter(|| {
                let w = f.map.apply(black_box(&f.z)).unwrap();
                (w, f.map.differential(&f.z, &f.v).unwrap())
            })
        });
        group.bench_with_input(BenchmarkId::new("hsc_origin", f.name), &f, |b, f| {
            b.iter(|| hsc_origin(&f.metric, black_box(&f.v)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hsc", f.name), &f, |b, f| {
            b.iter(|| hsc(&f.metric, black_box(&f.z), black_box(&f.v)).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("curvature_bounds");
    group.sample_size(10);
    for f in fixtures() {
        group.bench_with_input(BenchmarkId::from_parameter(f.name), &f, |b, f| {
            b.iter(|| curvature_bounds(&f.metric).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pointwise, bounds);
criterion_main!(benches);
