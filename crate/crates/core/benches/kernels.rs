use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use numrad_core::approx::{self, ApproxOptions, ApproxProblem, OperatorSubspace};
use numrad_core::par::Exec;
use numrad_core::radius::{self, Operator};
use numrad_core::space::{ScalarField, Space};
use numrad_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn random_op(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Operator {
    Operator(DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, if complex { rng.random::<f64>() - 0.5 } else { 0.0 })
    }))
}

fn seminorm(c: &mut Criterion) {
    let space = Space::max(5, ScalarField::Complex).unwrap();
    let pairs = space.extreme_pair_set(8).unwrap();
    let t = random_op(&mut ChaCha8Rng::seed_from_u64(1), 5, true);
    let mut group = c.benchmark_group(format!("seminorm_{}_pairs", pairs.len()));
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| radius::seminorm_with(exec, &t, &pairs).unwrap())
        });
    }
    group.finish();
}

fn numerical_index(c: &mut Criterion) {
    let space = Space::sum(3, ScalarField::Real).unwrap();
    let mut group = c.benchmark_group("numerical_index_l1_3_2000_trials");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| radius::numerical_index_with(exec, &space, 2000, 7).unwrap())
        });
    }
    group.finish();
}

fn approximation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let space = Space::max(3, ScalarField::Complex).unwrap();
    let basis = (0..3).map(|_| random_op(&mut rng, 3, true)).collect();
    let family = OperatorSubspace::over(ScalarField::Complex, 3, basis).unwrap();
    let problem = ApproxProblem::with_extreme_pairs(space, random_op(&mut rng, 3, true), family, 8).unwrap();
    let mut group = c.benchmark_group(format!("approx_complex_linf3_{}_pairs", problem.pairs.len()));
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| approx::solve_with(&problem, ApproxOptions { exec, ..ApproxOptions::default() }).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, seminorm, numerical_index, approximation);
criterion_main!(benches);
