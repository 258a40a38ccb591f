use std::f64::consts::FRAC_PI_3;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kerrwalk::{InitialState, WalkParams, Walker};

fn step_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for &(label, chi) in &[("linear", 0.0), ("kerr", 0.6)] {
        for &width in &[1_000usize, 10_000] {
            // Pre-spread the walker so every step touches `width` sites.
            let params = WalkParams::new(FRAC_PI_3, chi, width, InitialState::SymmetricCircular);
            let mut walker = Walker::new(&params).unwrap();
            for _ in 0..width / 2 {
                walker.step().unwrap();
            }
            group.bench_with_input(BenchmarkId::new(label, width), &walker, |b, w| {
                b.iter_batched_ref(
                    || w.clone(),
                    |w| black_box(w.step()).unwrap(),
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn observables(c: &mut Criterion) {
    let params = WalkParams::new(FRAC_PI_3, 0.6, 4000, InitialState::SymmetricCircular);
    let mut walker = Walker::new(&params).unwrap();
    for _ in 0..2000 {
        walker.step().unwrap();
    }
    c.bench_function("record/2000", |b| b.iter(|| black_box(walker.view().record().unwrap())));
}

criterion_group!(benches, step_kernel, observables);
criterion_main!(benches);
