use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qcoh_core::{
    bell_diagonal, decohering_power, relative_entropy_coherence, run_sweep, verify,
    BellDiagonalParams, ChannelKind, MeasureKind, MemoryChannel, SweepSpec, ValidationGrid,
};

fn eigenvalues(c: &mut Criterion) {
    let rho = bell_diagonal(BellDiagonalParams::EXAMPLE).unwrap();
    let out = MemoryChannel::build(ChannelKind::AmplitudeDamping, 0.4, 0.3)
        .unwrap()
        .apply_matrix(rho.matrix());
    c.bench_function("hermitian_eigenvalues_4x4", |b| {
        b.iter(|| black_box(&out).hermitian_eigenvalues().unwrap())
    });
}

fn apply(c: &mut Criterion) {
    let rho = bell_diagonal(BellDiagonalParams::EXAMPLE).unwrap();
    let mut group = c.benchmark_group("apply_and_measure");
    for kind in ChannelKind::ALL {
        let ch = MemoryChannel::build(kind, 0.4, 0.3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(kind), &ch, |b, ch| {
            b.iter(|| relative_entropy_coherence(&ch.apply(black_box(&rho)).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn decohering(c: &mut Criterion) {
    let mut group = c.benchmark_group("decohering_power_l1");
    for kind in ChannelKind::ALL {
        let ch = MemoryChannel::build(kind, 0.5, 0.3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(kind), &ch, |b, ch| {
            b.iter(|| decohering_power(black_box(ch), MeasureKind::L1Norm).unwrap())
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let spec = SweepSpec::new(ChannelKind::Depolarizing);
    c.bench_function("sweep_dep_default_grid", |b| {
        b.iter(|| run_sweep(black_box(&spec), 0).unwrap())
    });

    let grid = ValidationGrid {
        points: 6,
        ..ValidationGrid::default()
    };
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("all_6x6", |b| {
        b.iter(|| verify(None, black_box(&grid)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigenvalues, apply, decohering, sweeps);
criterion_main!(benches);
