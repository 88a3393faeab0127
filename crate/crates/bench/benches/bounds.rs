use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use discord_bounds::{compute_bounds, discord_upper_weak, make_dqc1, q_matrix};
use discord_bounds_bench::{dqc1_unitary, qudit_state, two_qubit_states};

fn two_qubit(c: &mut Criterion) {
    let states = two_qubit_states();
    let mut g = c.benchmark_group("two_qubit");
    for (i, rho) in states.iter().enumerate() {
        g.bench_with_input(BenchmarkId::new("compute_bounds", i + 1), rho, |b, rho| {
            b.iter(|| compute_bounds(black_box(rho)).unwrap())
        });
    }
    g.bench_function("discord_upper_weak", |b| b.iter(|| discord_upper_weak(black_box(&states[3])).unwrap()));
    g.finish();
}

fn qudit(c: &mut Criterion) {
    let mut g = c.benchmark_group("qudit");
    for d in [2usize, 4, 8, 16] {
        let rho = qudit_state(d);
        g.bench_with_input(BenchmarkId::new("q_matrix", d), &rho, |b, rho| b.iter(|| q_matrix(black_box(rho))));
        g.bench_with_input(BenchmarkId::new("compute_bounds", d), &rho, |b, rho| {
            b.iter(|| compute_bounds(black_box(rho)).unwrap())
        });
    }
    let rho = make_dqc1(&dqc1_unitary(6), 1.0).unwrap();
    g.bench_function("compute_bounds_dqc1_64", |b| b.iter(|| compute_bounds(black_box(&rho)).unwrap()));
    g.finish();
}

criterion_group!(benches, two_qubit, qudit);
criterion_main!(benches);
