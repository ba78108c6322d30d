use criterion::{black_box, criterion_group, criterion_main, Criterion};
use wgemit_bench::{emitter, symmetric, ta2o5};
use wgemit_core::emission::guided_rate_via_residue;
use wgemit_core::experiments::{sweep_height, Grid, Spacing, SweepSpec};
use wgemit_core::{branching_ratio, find_guided_modes, guided_rate, total_rate, Orientation};

fn modes(c: &mut Criterion) {
    let (stack, ctx) = ta2o5();
    c.bench_function("find_guided_modes/ta2o5", |b| {
        b.iter(|| find_guided_modes(black_box(&stack), &ctx).unwrap())
    });
}

fn rates(c: &mut Criterion) {
    let (stack, ctx) = ta2o5();
    let e = emitter(Orientation::parallel(), 0.0);
    let mode = find_guided_modes(&stack, &ctx).unwrap()[2];
    c.bench_function("guided_rate/ta2o5_tm0", |b| {
        b.iter(|| guided_rate(black_box(&mode), &stack, &ctx, &e).unwrap())
    });
    c.bench_function("guided_rate_via_residue/ta2o5_tm0", |b| {
        b.iter(|| guided_rate_via_residue(&stack, &ctx, &e, black_box(&mode)).unwrap())
    });
    c.bench_function("total_rate/ta2o5", |b| {
        b.iter(|| total_rate(black_box(&stack), &ctx, &e).unwrap())
    });
    let (sym, sctx) = symmetric(255.0);
    let perp = emitter(Orientation::perpendicular(), 0.0);
    c.bench_function("branching_ratio/symmetric_255", |b| {
        b.iter(|| branching_ratio(black_box(&sym), &sctx, &perp).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut spec = SweepSpec::fig2();
    spec.grid = Grid::new(1e-9, 2e-6, 50, Spacing::Log).unwrap();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(20);
    group.bench_function("height/ta2o5_50pts", |b| b.iter(|| sweep_height(black_box(&spec)).unwrap()));
    group.finish();
}

criterion_group!(benches, modes, rates, sweeps);
criterion_main!(benches);
