use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use deltasigma::decimation::codec::{decode, encode};
use deltasigma::decimation::decimate;
use deltasigma::kernels::{build_kernel_table, KernelParams};
use deltasigma::reconstruction::{reconstruct_decimated, time_grid};
use deltasigma::sigma_delta::{run_first_order, run_rth_order, QuantizerConfig};
use deltasigma::signal::random_signal;
use deltasigma::{DecimationParams, SampleGrid};

const LAMBDA: f64 = 56.0;

fn samples(n: i64) -> Vec<f64> {
    let sig = random_signal(0, 8, 0.5, (0.0, n as f64 / LAMBDA)).unwrap();
    sig.sample(&SampleGrid::new(LAMBDA, 0, n - 1).unwrap())
        .unwrap()
}

fn quantizers(c: &mut Criterion) {
    let x = samples(100_000);
    c.bench_function("first order 1e5", |b| {
        b.iter(|| run_first_order(black_box(&x), 0.0).unwrap())
    });
    let cfg = QuantizerConfig::greedy(2).without_states();
    c.bench_function("greedy order 2 1e5", |b| {
        b.iter(|| run_rth_order(black_box(&x), &cfg).unwrap())
    });
}

fn decimation_codec(c: &mut Criterion) {
    let q = run_first_order(&samples(100_000), 0.0).unwrap().bits;
    let params = DecimationParams::new(3, 2, LAMBDA).unwrap();
    c.bench_function("decimate r=2 rho=3 1e5", |b| {
        b.iter(|| decimate(black_box(&q), 0, &params).unwrap())
    });
    let stream = decimate(&q, 0, &params).unwrap();
    c.bench_function("encode", |b| b.iter(|| encode(black_box(&stream)).unwrap()));
    let packed = encode(&stream).unwrap();
    c.bench_function("decode", |b| b.iter(|| decode(black_box(&packed)).unwrap()));
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    g.sample_size(10);
    let p = KernelParams::decimated(LAMBDA, 8.0, 2).unwrap();
    g.bench_function("table lambda'=8 r=2", |b| {
        b.iter(|| build_kernel_table(black_box(&p)).unwrap())
    });
    g.finish();
}

fn reconstruction(c: &mut Criterion) {
    let params = DecimationParams::new(3, 1, LAMBDA).unwrap();
    let kernel =
        build_kernel_table(&KernelParams::decimated(LAMBDA, params.lambda_prime(), 1).unwrap())
            .unwrap();
    let pad = kernel.support_radius + 2.0;
    let sig = random_signal(1, 8, 0.9, (0.0, 16.0)).unwrap();
    let grid = SampleGrid::covering(LAMBDA, -pad, 16.0 + pad).unwrap();
    let q = run_first_order(&sig.sample(&grid).unwrap(), 0.0)
        .unwrap()
        .bits;
    let stream = decimate(&q, grid.n_start, &params).unwrap();
    let t = time_grid(0.0, 16.0, 16);
    c.bench_function("reconstruct 256 points", |b| {
        b.iter_batched(
            || t.clone(),
            |t| reconstruct_decimated(&stream, &kernel, &t).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    quantizers,
    decimation_codec,
    kernels,
    reconstruction
);
criterion_main!(benches);
