//! Kernel-apply benchmarks: rayon-parallel vs single-threaded drivers, and
//! the direct vs FFT backends, across grid sizes.
//!
//! Run with `cargo bench -p cauchywell`. Disabling the default `parallel`
//! feature turns the parallel driver into the sequential one, so comparing
//! `apply` against `apply_serial` in a default build shows the rayon gain.

use cauchywell::grid::{make_grid, GridKind};
use cauchywell::operators::{Backend, Sector, SectorOperator, SectorState};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_profile(x: f64) -> f64 {
    (-0.6 * x.abs()).exp() * (1.3 * x).sin() + 0.2 * (-x * x).exp()
}

fn radial_l1_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("radial_l1_apply");
    group.sample_size(10);
    for &n in &[512usize, 2048, 8192] {
        let dx = 8.0 / n as f64;
        let grid = make_grid(GridKind::Radial, 8.0, dx).unwrap();
        let state = SectorState::from_fn(grid.clone(), Sector::L1, bench_profile).unwrap();
        let direct = SectorOperator::with_backend(grid.clone(), Sector::L1, Backend::Direct).unwrap();
        let fft = SectorOperator::with_backend(grid.clone(), Sector::L1, Backend::Fft).unwrap();

        group.bench_with_input(BenchmarkId::new("direct_parallel", n), &n, |b, _| {
            b.iter(|| black_box(direct.apply(black_box(state.samples())).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("direct_serial", n), &n, |b, _| {
            b.iter(|| black_box(direct.apply_serial(black_box(state.samples())).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            let mut scratch = fft.scratch();
            b.iter(|| {
                black_box(
                    fft.apply_with_scratch(black_box(state.samples()), &mut scratch)
                        .unwrap(),
                )
            })
        });
    }
    group.finish();
}

fn cauchy_1d_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("cauchy_1d_apply");
    group.sample_size(10);
    for &n in &[1024usize, 4096, 16384] {
        let dx = 16.0 / n as f64;
        let grid = make_grid(GridKind::Symmetric, 8.0, dx).unwrap();
        let state = SectorState::from_fn(grid.clone(), Sector::OneDOdd, bench_profile).unwrap();
        let direct =
            SectorOperator::with_backend(grid.clone(), Sector::OneDOdd, Backend::Direct).unwrap();
        let fft = SectorOperator::with_backend(grid.clone(), Sector::OneDOdd, Backend::Fft).unwrap();

        group.bench_with_input(BenchmarkId::new("direct_parallel", n), &n, |b, _| {
            b.iter(|| black_box(direct.apply(black_box(state.samples())).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("direct_serial", n), &n, |b, _| {
            b.iter(|| black_box(direct.apply_serial(black_box(state.samples())).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            let mut scratch = fft.scratch();
            b.iter(|| {
                black_box(
                    fft.apply_with_scratch(black_box(state.samples()), &mut scratch)
                        .unwrap(),
                )
            })
        });
    }
    group.finish();
}

fn oracle_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_assemble_l1");
    group.sample_size(10);
    for &n in &[256usize, 512] {
        let dx = 6.0 / n as f64;
        let grid = make_grid(GridKind::Radial, 6.0, dx).unwrap();
        let pot = cauchywell::operators::WellPotential::new(3.5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(cauchywell::oracle::assemble(Sector::L1, &grid, &pot).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, radial_l1_apply, cauchy_1d_apply, oracle_assembly);
criterion_main!(benches);
