use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mgonal::mc::{self, IntervalKind, SamplerConfig};
use mgonal::oracle::{self, CensusOptions};
use mgonal::{Execution, MGonParams};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn summand_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("summand_experiment");
    group.sample_size(10);
    for m in [3u32, 6] {
        let config = SamplerConfig::new(
            MGonParams::new(m).unwrap(),
            600,
            IntervalKind::Full,
            20_000,
            1,
        )
        .unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &config, |b, cfg| {
                b.iter(|| mc::run_summand_experiment(black_box(cfg), exec))
            });
        }
    }
    group.finish();
}

fn longest_gap_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("longest_gap_experiment");
    group.sample_size(10);
    let config = SamplerConfig::new(
        MGonParams::new(3).unwrap(),
        600,
        IntervalKind::Bracket,
        5_000,
        1,
    )
    .unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| mc::run_longest_gap_experiment(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_all");
    group.sample_size(10);
    for (m, n) in [(2u32, 10u64), (3, 8)] {
        let params = MGonParams::new(m).unwrap();
        for (name, execution) in MODES {
            let options = CensusOptions {
                joint: false,
                execution,
            };
            group.bench_function(BenchmarkId::new(name, format!("m{m}_n{n}")), |b| {
                b.iter(|| oracle::enumerate_all(params, black_box(n), options).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(
    benches,
    summand_experiment,
    longest_gap_experiment,
    enumeration
);
criterion_main!(benches);
