use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gossip_core::conductance::estimate::{estimate_critical, EstimateOptions};
use gossip_core::conductance::{self};
use gossip_core::graph::generate::{self, TargetPredicate};
use gossip_core::guessing::{
    new_game, strategy_adaptive_exhaustive, strategy_random_per_endpoint,
};
use gossip_core::protocols::{l_dtg, push_pull, run_t_sequence, spanner_construct, PushPullMode};
use gossip_core::sim::SimConfig;

fn exact_analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("conductance_exact");
    for n in [8usize, 12] {
        let g = generate::random_connected(n, 2 * n, 16, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| conductance::analyze(black_box(g)).unwrap());
        });
    }
    group.finish();
}

fn critical_estimator(c: &mut Criterion) {
    let g = generate::random_connected(64, 160, 64, 7).unwrap();
    c.bench_function("estimate_critical_n64", |b| {
        b.iter(|| estimate_critical(black_box(&g), EstimateOptions::default()).unwrap());
    });
}

fn push_pull_rounds(c: &mut Criterion) {
    let clique = generate::clique(64, 1).unwrap();
    c.bench_function("push_pull_clique64", |b| {
        b.iter(|| {
            push_pull(black_box(&clique), PushPullMode::AllToAll, &SimConfig::new(11, 10_000))
                .unwrap()
        });
    });

    let gadget = generate::gadget(16, 1, 256, &TargetPredicate::RandomP(0.25), false, 5)
        .unwrap()
        .graph;
    c.bench_function("push_pull_gadget_broadcast", |b| {
        b.iter(|| {
            push_pull(
                black_box(&gadget),
                PushPullMode::Broadcast { source: 0 },
                &SimConfig::new(11, 100_000),
            )
            .unwrap()
        });
    });
}

fn phase_runners(c: &mut Criterion) {
    let path = generate::path(&[1u64; 31]).unwrap();
    c.bench_function("l_dtg_path32", |b| {
        b.iter(|| l_dtg(black_box(&path), 1, &SimConfig::new(0, 100_000)).unwrap());
    });

    let g = generate::random_connected(24, 48, 8, 9).unwrap();
    c.bench_function("t_sequence_k4_n24", |b| {
        b.iter(|| run_t_sequence(black_box(&g), 4, &SimConfig::new(0, 1_000_000)).unwrap());
    });
}

fn spanner(c: &mut Criterion) {
    let g = generate::random_connected(64, 160, 8, 3).unwrap();
    c.bench_function("spanner_n64_k12", |b| {
        b.iter(|| spanner_construct(black_box(&g), 4096, 12, 3).unwrap());
    });
}

fn guessing(c: &mut Criterion) {
    let mut group = c.benchmark_group("guessing_adaptive");
    for m in [64usize, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| {
                let mut game = new_game(m, &TargetPredicate::Singleton, 7).unwrap();
                strategy_adaptive_exhaustive(&mut game).unwrap()
            });
        });
    }
    group.finish();

    c.bench_function("guessing_random_m64", |b| {
        b.iter(|| {
            let mut game = new_game(64, &TargetPredicate::Singleton, 7).unwrap();
            strategy_random_per_endpoint(&mut game, 13, 100_000).unwrap()
        });
    });
}

criterion_group!(
    benches,
    exact_analysis,
    critical_estimator,
    push_pull_rounds,
    phase_runners,
    spanner,
    guessing
);
criterion_main!(benches);
