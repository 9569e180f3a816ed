//! Sequential vs data-parallel execution of the hot loops, plus the two
//! estimators side by side.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graddens::catalog::{self, discrete_derivative, Params};
use graddens::charfunc::{characteristic_function_with, omega_count};
use graddens::harness::{tau_sweep_fields, CompareOptions};
use graddens::wave::{estimate_density_wave_with, Coverage, TauParameter};
use graddens::{Execution, ScalarField};

fn sinusoid(n: usize) -> (ScalarField, ScalarField) {
    let tf = catalog::lookup("sinusoid", &Params::new()).unwrap();
    let (big, _) = catalog::sample(&tf, &tf.grid(n).unwrap()).unwrap();
    let small = discrete_derivative(&big).unwrap();
    (big, small)
}

fn characteristic_function(c: &mut Criterion) {
    let mut group = c.benchmark_group("characteristic_function");
    group.sample_size(10);
    for n in [1 << 10, 1 << 11, 1 << 12] {
        let (_, small) = sinusoid(n);
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &small, |b, s| {
                b.iter(|| characteristic_function_with(black_box(s), omega_count(n), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn wave_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("wave_estimate");
    let tau = TauParameter::new(1e-4).unwrap();
    for n in [1 << 10, 1 << 12, 1 << 14] {
        let (big, _) = sinusoid(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &big, |b, s| {
            b.iter(|| estimate_density_wave_with(black_box(s), tau, Coverage::Allow).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("tau_sweep");
    group.sample_size(10);
    let (big, _) = sinusoid(1 << 11);
    let taus = [1e-3, 8e-4, 6e-4, 4e-4];
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let opts = CompareOptions {
            exec,
            ..Default::default()
        };
        group.bench_function(label, |b| {
            b.iter(|| tau_sweep_fields("sinusoid", black_box(&big), &taus, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, characteristic_function, wave_estimate, sweep);
criterion_main!(benches);
