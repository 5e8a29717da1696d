use std::hint::black_box;

use approxcara::caratheodory::Method;
use approxcara::experiment::{run_experiment, run_separation_scan, ExperimentConfig, ScanFamily};
use approxcara::par;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn separation_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("euclid_scan");
    group.sample_size(10);
    for (label, parallel) in [("sequential", false), ("parallel", true)] {
        group.bench_with_input(BenchmarkId::new(label, "d16_d32"), &parallel, |b, &parallel| {
            par::set_parallel(parallel);
            b.iter(|| run_separation_scan(ScanFamily::Euclid, black_box(&[16, 32]), 0.1, 2.0, Method::Greedy).unwrap());
        });
    }
    par::set_parallel(true);
    group.finish();
}

fn random_experiment(c: &mut Criterion) {
    let cfg = ExperimentConfig::from_toml_str(
        "instance = \"random\"\nd = 15\nsamples = 4\nk_max = 200\nseed = 7\nmethods = \"greedy\"\n",
    )
    .unwrap();
    let mut group = c.benchmark_group("random_d15");
    group.sample_size(10);
    for (label, parallel) in [("sequential", false), ("parallel", true)] {
        group.bench_function(label, |b| {
            par::set_parallel(parallel);
            b.iter(|| run_experiment(black_box(&cfg)).unwrap());
        });
    }
    par::set_parallel(true);
    group.finish();
}

criterion_group!(benches, separation_scan, random_experiment);
criterion_main!(benches);
