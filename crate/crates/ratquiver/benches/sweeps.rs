use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ratquiver::quiver::fixtures;
use ratquiver::sweeps::*;

fn modes() -> Vec<(&'static str, bool)> {
    let mut m = vec![("sequential", false)];
    if parallel_available() {
        m.push(("parallel", true));
    }
    m
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweeps");
    g.sample_size(10);
    for (label, par) in modes() {
        g.bench_with_input(BenchmarkId::new("quiver_roundtrip", label), &par, |b, &p| {
            b.iter(|| quiver_roundtrip_sweep(fixtures::c2(), DEFAULT_SEED, 50, p))
        });
        g.bench_with_input(BenchmarkId::new("hom_descent", label), &par, |b, &p| {
            b.iter(|| hom_descent_sweep(DEFAULT_SEED, 50, p))
        });
        g.bench_with_input(BenchmarkId::new("stabilize", label), &par, |b, &p| {
            b.iter(|| stabilize_sweep(DEFAULT_SEED, 20, p))
        });
        g.bench_with_input(BenchmarkId::new("essential_surjectivity", label), &par, |b, &p| {
            b.iter(|| essential_surjectivity_sweep(DEFAULT_SEED, 10, true, p))
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
