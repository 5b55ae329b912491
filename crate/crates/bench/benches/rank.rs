use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use troprank::rational::rat;
use troprank::{Matrix, PhiMatrix, SamplerParams, Scalar, ZeroOneMatrix};

fn random_square(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| match rng.gen_range(0..10) {
                    0 => Scalar::Infinity,
                    1 => Scalar::g(rng.gen_range(-5..=5)),
                    _ => Scalar::t(rng.gen_range(-5..=5)),
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(grid).unwrap()
}

fn permanent(c: &mut Criterion) {
    let mut group = c.benchmark_group("permanent");
    for n in [4, 6, 8] {
        let m = random_square(n, n as u64);
        group.bench_with_input(BenchmarkId::new("expansion", n), &m, |b, m| {
            b.iter(|| black_box(m.permanent().unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("assignment", n), &m, |b, m| {
            b.iter(|| black_box(m.permanent_fast().unwrap()))
        });
    }
    group.finish();
}

fn nonsingularity(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonsingular");
    for n in [8, 16, 32] {
        let m = random_square(n, 100 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| black_box(m.is_nonsingular_fast().unwrap()))
        });
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank");
    for n in [5, 7] {
        let m = random_square(n, 200 + n as u64);
        group.bench_with_input(BenchmarkId::new("descending", n), &m, |b, m| {
            b.iter(|| black_box(m.tropical_rank().unwrap().rank))
        });
        group.bench_with_input(BenchmarkId::new("enumerative", n), &m, |b, m| {
            b.iter(|| black_box(m.tropical_rank_enumerative(u64::MAX).unwrap()))
        });
    }
    group.finish();
}

fn phi_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("phi_rank");
    group.sample_size(10);
    let cyclic = ZeroOneMatrix::from_fn(6, 6, |i, j| j == i || j == (i + 1) % 6);
    let desk = PhiMatrix::build(&cyclic, 2).unwrap();
    group.bench_function("desk_12", |b| {
        b.iter(|| black_box(desk.matrix().tropical_rank_enumerative(u64::MAX).unwrap()))
    });
    let p = SamplerParams::unchecked_range(3, rat(1, 4), 1).unwrap();
    let sampled = PhiMatrix::build(&troprank::sampler::sample_candidate(&p), 3).unwrap();
    group.bench_function("sampled_9", |b| {
        b.iter(|| black_box(sampled.matrix().tropical_rank_enumerative(u64::MAX).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, permanent, nonsingularity, rank, phi_rank);
criterion_main!(benches);
