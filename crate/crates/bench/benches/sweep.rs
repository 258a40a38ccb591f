use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kerrwalk::{run_sweep, InitialState, SweepSpec};

fn small_diagram(c: &mut Criterion) {
    let spec = SweepSpec::new(8, 8, 400, InitialState::RightOnly);
    let mut group = c.benchmark_group("sweep_8x8_T400");
    group.sample_size(10);
    for workers in [1, 4] {
        group.bench_function(format!("workers={workers}"), |b| {
            b.iter(|| black_box(run_sweep(&spec, workers).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, small_diagram);
criterion_main!(benches);
