use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use doodler_core::data::{ImageShape, NoiseKind};
use doodler_core::detector::simulate_rejection_rate;
use doodler_core::nn::{Architecture, Autoencoder};
use doodler_core::stats::recon_errors;
use doodler_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn shape() -> ImageShape {
    ImageShape::new(1, 28, 28)
}

fn bench_recon_errors(c: &mut Criterion) {
    let model = Autoencoder::new(&Architecture::default(), 1).expect("default architecture");
    let images = NoiseKind::Uniform
        .generate(2048, shape(), 1, Execution::Sequential)
        .expect("noise");
    let mut g = c.benchmark_group("recon_errors_2048");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(recon_errors(&model, &images, exec).expect("errors")))
        });
    }
    g.finish();
}

fn bench_noise(c: &mut Criterion) {
    let mut g = c.benchmark_group("gaussian_noise_4096");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                black_box(
                    NoiseKind::default_gaussian()
                        .generate(4096, shape(), 7, exec)
                        .expect("noise"),
                )
            })
        });
    }
    g.finish();
}

fn bench_stream_simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("rejection_rate_2000x100");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                black_box(
                    simulate_rejection_rate(0.01, 0.002, 0.0, 100, 2000, 0.01, 3, exec)
                        .expect("simulation"),
                )
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_recon_errors, bench_noise, bench_stream_simulation);
criterion_main!(benches);
