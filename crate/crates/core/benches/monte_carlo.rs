use std::hint::black_box;

use cosearch::par::with_workers;
use cosearch::{
    monte_carlo, sweep, AgentSpec, Axis, Perpetuation, RngPolicy, SweepParam, SweepSpec,
    TaskConfig, TaskKind, Thresholds, UpdateMode,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn h_to_ai() -> TaskConfig {
    let m = UpdateMode::Probabilistic;
    TaskConfig::new(
        TaskKind::HToAi {
            c: 4,
            perpetuation: Perpetuation::RuleBased,
        },
        AgentSpec::human(20, 2, m),
        AgentSpec::ai(200, 4, m),
    )
    .unwrap()
}

fn bench_cell(c: &mut Criterion) {
    let cfg = h_to_ai();
    let policy = RngPolicy::new(1);
    let mut group = c.benchmark_group("monte_carlo_cell_1000");
    group.bench_function("one_worker", |b| {
        b.iter(|| {
            with_workers(Some(1), || {
                monte_carlo(black_box(&cfg), 1000, &policy).unwrap()
            })
        })
    });
    group.bench_function("all_workers", |b| {
        b.iter(|| {
            with_workers(None, || {
                monte_carlo(black_box(&cfg), 1000, &policy).unwrap()
            })
        })
    });
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let m = UpdateMode::Probabilistic;
    let spec = SweepSpec {
        template: TaskConfig::new(
            TaskKind::Modular,
            AgentSpec::human(20, 2, m),
            AgentSpec::ai(40, 4, m),
        )
        .unwrap(),
        axis1: Axis::new(SweepParam::NAiRatio, (1..=20).map(f64::from).collect()),
        axis2: Axis::new(SweepParam::KHRatio, vec![0.25, 1.0, 4.0]),
        n_runs: 200,
        policy: RngPolicy::new(3),
        thresholds: Thresholds::default(),
    };
    let mut group = c.benchmark_group("modular_sweep_20x3x200");
    group.sample_size(10);
    group.bench_function("one_worker", |b| {
        b.iter(|| with_workers(Some(1), || sweep(black_box(&spec)).unwrap()))
    });
    group.bench_function("all_workers", |b| {
        b.iter(|| with_workers(None, || sweep(black_box(&spec)).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_cell, bench_sweep);
criterion_main!(benches);
