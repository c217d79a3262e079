use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morphquad::harness::{bundled, bundled_names, run_batch, seed_batch, ScenarioConfig};
use morphquad::parallel::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn seeds(c: &mut Criterion) {
    let cfg = ScenarioConfig { duration: 2.0, ..bundled("circle_morph").unwrap() };
    let seeds: Vec<u64> = (0..16).collect();
    let mut group = c.benchmark_group("seed_batch_16x2s");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| seed_batch(&cfg, &seeds, mode)));
    }
    group.finish();
}

fn scenarios(c: &mut Criterion) {
    let configs: Vec<ScenarioConfig> = bundled_names()
        .map(|n| {
            let cfg = bundled(n).unwrap();
            ScenarioConfig { duration: cfg.duration.min(3.0), ..cfg }
        })
        .collect();
    let mut group = c.benchmark_group("bundled_batch_3s");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_batch(&configs, mode)));
    }
    group.finish();
}

criterion_group!(benches, seeds, scenarios);
criterion_main!(benches);
