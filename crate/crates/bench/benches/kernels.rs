use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigfl_core::experiments::{run, Experiment, ExperimentConfig};
use sigfl_core::interconnection::solve_sylvester;
use sigfl_core::lti::{random_minimal_system, TimeDomain};
use sigfl_core::numerics::{numerical_rank, svd};
use sigfl_core::siggen::{max_pe_order, random_dense_generator, realize_from_signal, response};
use sigfl_core::Matrix;

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random::<f64>() - 0.5)
}

fn dense(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("dense");
    for size in [8, 32, 96] {
        let m = random_matrix(size, size + 4, &mut rng);
        group.bench_with_input(BenchmarkId::new("svd", size), &m, |b, m| {
            b.iter(|| svd(black_box(m)))
        });
        group.bench_with_input(BenchmarkId::new("numerical_rank", size), &m, |b, m| {
            b.iter(|| numerical_rank(black_box(m), None))
        });
    }
    group.finish();
}

fn sylvester(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut group = c.benchmark_group("sylvester");
    for n in [3, 6, 10] {
        let plant = random_minimal_system(n, TimeDomain::Discrete, &mut rng).unwrap();
        let gen = random_dense_generator(n + 2, TimeDomain::Discrete, &mut rng).unwrap();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| solve_sylvester(black_box(&plant), black_box(&gen)))
        });
    }
    group.finish();
}

fn signals(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut group = c.benchmark_group("signal");
    for n_g in [2, 4, 6] {
        let gen = random_dense_generator(n_g, TimeDomain::Discrete, &mut rng).unwrap();
        let u = response(&gen, 4 * n_g).unwrap();
        group.bench_with_input(BenchmarkId::new("max_pe_order", n_g), &u, |b, u| {
            b.iter(|| max_pe_order(black_box(u)))
        });
        group.bench_with_input(BenchmarkId::new("realize", n_g), &u, |b, u| {
            b.iter(|| realize_from_signal(black_box(u), None))
        });
    }
    group.finish();
}

fn experiments(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::new(Experiment::Corollary2, 10, 4);
    cfg.n = vec![4];
    c.bench_function("corollary2/n=4/10 trials", |b| {
        b.iter(|| run(black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, dense, sylvester, signals, experiments);
criterion_main!(benches);
