use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use catenoid::simons::algebraic_battery;
use catenoid::spectrum::{morse_index_with, IndexConfig};
use catenoid::{make_spec, Execution};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn battery(c: &mut Criterion) {
    let mut group = c.benchmark_group("algebraic_battery");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new(name, 7), &exec, |b, &exec| {
            b.iter(|| algebraic_battery(black_box(7), 1000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn index(c: &mut Criterion) {
    let spec = make_spec(5, 1.0).unwrap();
    let mut group = c.benchmark_group("morse_index");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let config = IndexConfig {
            exec,
            ..IndexConfig::default()
        };
        group.bench_with_input(BenchmarkId::new(name, "n5_R8"), &config, |b, &config| {
            b.iter(|| morse_index_with(&spec, black_box(0.0), 8.0, 6, config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, battery, index);
criterion_main!(benches);
