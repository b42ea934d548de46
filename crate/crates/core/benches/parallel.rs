use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nagp::decompose::cartan_kpk;
use nagp::exec::{self, Strategy};
use nagp::holonomy::{example_path, sweep_example, wilson_loop, ExampleVariant, WilsonOptions};
use nagp::sampling::random_unitary4;

const STRATEGIES: [(&str, Strategy); 2] = [
    ("parallel", Strategy::Parallel),
    ("sequential", Strategy::Sequential),
];

fn options(strategy: Strategy, exact: bool) -> WilsonOptions {
    let mut opts = WilsonOptions::with_tol(1e-12);
    opts.integrator.strategy = strategy;
    opts.exact_constant_segments = exact;
    opts
}

fn stepped_wilson_loop(c: &mut Criterion) {
    let path = example_path(1.0, ExampleVariant::Diagonal).unwrap();
    let mut group = c.benchmark_group("wilson_loop_stepped");
    for (name, strategy) in STRATEGIES {
        let opts = options(strategy, false);
        group.bench_function(name, |b| {
            b.iter(|| wilson_loop(black_box(&path), &opts).unwrap())
        });
    }
    group.finish();
}

fn s2_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("s2_sweep");
    for n in [16usize, 256] {
        let values: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        for (name, strategy) in STRATEGIES {
            let opts = options(strategy, true);
            group.bench_with_input(BenchmarkId::new(name, n), &values, |b, v| {
                b.iter(|| sweep_example(black_box(v), ExampleVariant::Diagonal, &opts))
            });
        }
    }
    group.finish();
}

fn cartan_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let batch: Vec<_> = (0..512).map(|_| random_unitary4(&mut rng)).collect();
    let mut group = c.benchmark_group("cartan_batch_512");
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| exec::map(black_box(&batch), strategy, cartan_kpk))
        });
    }
    group.finish();
}

criterion_group!(benches, stepped_wilson_loop, s2_sweep, cartan_batch);
criterion_main!(benches);
