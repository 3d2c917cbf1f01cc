//! Cost of one θ-scheme step as a function of N (sine-Gordon, so every
//! sweep goes through the FFT path).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kgspectral::problems::{sine_gordon_period, ProblemSpec};
use kgspectral::spectral::GridSpec;
use kgspectral::stepper::{SolverParams, SpectralState, Stepper};

fn bench_step(c: &mut Criterion) {
    let length = sine_gordon_period();
    let problem = ProblemSpec::sine_gordon(length).unwrap();
    let params = SolverParams::crank_nicolson(2f64.powi(-12)).unwrap();
    let mut group = c.benchmark_group("step");
    for e in 5..=12 {
        let n = 1usize << e;
        let grid = GridSpec::with_auto_points(length, n, 4 * n + 1).unwrap();
        let stepper = Stepper::new(&problem, &grid, params).unwrap();
        let state = SpectralState::from_initial(&problem, &grid).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| stepper.step(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_transform(c: &mut Criterion) {
    let length = sine_gordon_period();
    let problem = ProblemSpec::sine_gordon(length).unwrap();
    let mut group = c.benchmark_group("synthesize");
    for e in [5, 8, 11] {
        let n = 1usize << e;
        let grid = GridSpec::with_auto_points(length, n, 4 * n + 1).unwrap();
        let state = SpectralState::from_initial(&problem, &grid).unwrap();
        group.bench_with_input(BenchmarkId::new("fft", n), &state, |b, s| {
            b.iter(|| kgspectral::spectral::synthesize(black_box(&s.u), &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("direct", n), &state, |b, s| {
            b.iter(|| kgspectral::spectral::reference::synthesize(black_box(&s.u), &grid).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_step, bench_transform);
criterion_main!(benches);
