use criterion::{criterion_group, criterion_main, Criterion};

use haptic_maze::compare::{run_batch, run_batch_sequential, COMPARED_PROFILES};
use haptic_maze::maze::{load_maze, Maze};
use haptic_maze::sim::SimConfig;

fn bench_compare(c: &mut Criterion) {
    let maze = load_maze("maze1").expect("builtin maze");
    let jobs: Vec<(SimConfig, &Maze)> = COMPARED_PROFILES
        .iter()
        .map(|&mode| {
            let cfg = SimConfig {
                profile_mode: mode,
                ..SimConfig::default()
            };
            (cfg, &maze)
        })
        .collect();

    let mut group = c.benchmark_group("compare-maze1");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| run_batch(&jobs)));
    group.bench_function("sequential", |b| b.iter(|| run_batch_sequential(&jobs)));
    group.finish();
}

criterion_group!(benches, bench_compare);
criterion_main!(benches);
