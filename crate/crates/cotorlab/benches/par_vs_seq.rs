//! Sequential vs. parallel driver comparison for the degree-indexed
//! computations. Each benchmark runs the same workload under both
//! `ExecMode`s so the speedup (or overhead on small inputs) is visible
//! directly in the criterion report.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cotorlab::annular::coskeletal_page;
use cotorlab::coalgebra::{coideal, cotensor_power, cotor, curve_coalgebra};
use cotorlab::coeffring::{build_field, rank_kernel_cokernel, GradedMatrix};
use cotorlab::ExecMode;

/// Random graded matrix over F_q with `degs` degrees of size ~`dim`.
fn random_graded(p: u64, d: usize, degs: usize, dim: usize, seed: u64) -> GradedMatrix {
    let field = build_field(p, d).unwrap();
    let q = field.q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = (0..degs).map(|_| dim + rng.gen_range(0..4)).collect();
    let tgt: Vec<usize> = (0..degs).map(|_| dim + rng.gen_range(0..4)).collect();
    let mut m = GradedMatrix::zero(field, dims.clone(), tgt.clone());
    for n in 0..degs {
        let fill = dims[n] * tgt[n] / 3;
        for _ in 0..fill {
            let r = rng.gen_range(0..tgt[n]);
            let c = rng.gen_range(0..dims[n]);
            let v = rng.gen_range(0..q);
            m.push(n, r, c, v).unwrap();
        }
    }
    m
}

fn bench_rank_reports(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_kernel_cokernel");
    for (degs, dim) in [(16usize, 24usize), (32, 40)] {
        let m = random_graded(5, 1, degs, dim, 0x5eed);
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let label = format!("{degs}degx{dim}/{mode:?}");
            group.bench_with_input(BenchmarkId::from_parameter(label), &m, |b, m| {
                b.iter(|| rank_kernel_cokernel(m, mode));
            });
        }
    }
    group.finish();
}

fn bench_cotor(c: &mut Criterion) {
    let mut group = c.benchmark_group("cotor_curve");
    let field = build_field(3, 1).unwrap();
    let curve = curve_coalgebra(&field, 10).unwrap();
    let powers = cotensor_power(&curve, 2, 10, ExecMode::Sequential).unwrap();
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        let label = format!("T10_sq/{mode:?}");
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| {
                cotor(&powers.levels[0], &curve, &powers.levels[2], 10, mode).unwrap()
            });
        });
    }
    group.finish();
}

fn bench_tower_page(c: &mut Criterion) {
    let mut group = c.benchmark_group("coskeletal_page");
    let field = build_field(2, 1).unwrap();
    let curve = curve_coalgebra(&field, 8).unwrap();
    let m = coideal(&curve).unwrap();
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        let label = format!("T8_full/{mode:?}");
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| coskeletal_page(&m, &curve, &m, 7, 16, 8, mode).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rank_reports, bench_cotor, bench_tower_page);
criterion_main!(benches);
