use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cvcensus::measures::{GridPlan, MetricKind};
use cvcensus::montecarlo::{run_bures_census, run_classical_census, BuresConfig, RunOptions, SamplerConfig};

fn workers() -> Vec<usize> {
    let available = std::thread::available_parallelism().map_or(1, usize::from);
    let mut w = vec![1];
    if cfg!(feature = "parallel") {
        w.push(available.max(2));
    }
    w
}

fn classical(c: &mut Criterion) {
    let cfg = SamplerConfig::two_mode(10.0, 5.0, 50_000, 1);
    let mut group = c.benchmark_group("classical-census");
    group.sample_size(10);
    for w in workers() {
        let opts = RunOptions { workers: w, ..RunOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(w), &opts, |b, opts| {
            b.iter(|| run_classical_census(&cfg, opts).unwrap())
        });
    }
    group.finish();
}

fn bures(c: &mut Criterion) {
    let cfg = SamplerConfig::two_mode(15.0, 15.0, 100_000, 1);
    let bures = BuresConfig { plan: GridPlan::default(), metrics: vec![MetricKind::Bures] };
    let mut group = c.benchmark_group("bures-census");
    group.sample_size(10);
    for w in workers() {
        let opts = RunOptions { workers: w, ..RunOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(w), &opts, |b, opts| {
            b.iter(|| run_bures_census(&cfg, &bures, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, classical, bures);
criterion_main!(benches);
