use criterion::{black_box, criterion_group, criterion_main, Criterion};

use tocone::bath::{
    dense_channel_oracle, make_bath, random_block_unitary, svd_normal_form,
    transition_from_unitary, Scheme,
};
use tocone::ento::{
    apply_channel, kraus_from_transition, lp_oracle_max, max_coherence_ento, optimal_transition,
    sweep_cone,
};
use tocone::DensityMatrix;

fn bench_cone(c: &mut Criterion) {
    c.bench_function("max_coherence_ento", |b| {
        b.iter(|| max_coherence_ento(black_box(0.5), black_box(0.42), black_box(0.37)).unwrap())
    });
    c.bench_function("lp_oracle_max_grid500", |b| {
        b.iter(|| lp_oracle_max(black_box(0.5), 0.42, 0.37, 500).unwrap())
    });
    c.bench_function("sweep_cone_grid100", |b| {
        b.iter(|| sweep_cone(black_box(0.5), 100).unwrap())
    });
}

fn bench_channel(c: &mut Criterion) {
    let g = optimal_transition(0.5, 0.42, 0.37).unwrap();
    let ch = kraus_from_transition(&g).unwrap();
    let rho0 = DensityMatrix::psi01_plus();
    c.bench_function("apply_channel", |b| {
        b.iter(|| apply_channel(black_box(&ch), black_box(&rho0)).unwrap())
    });
}

fn bench_bath(c: &mut Criterion) {
    let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
    let u = random_block_unitary(&bath, 42).unwrap();
    let rho0 = DensityMatrix::psi01_plus();
    c.bench_function("random_block_unitary_k4", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            random_block_unitary(black_box(&bath), seed).unwrap()
        })
    });
    c.bench_function("transition_from_unitary_k4", |b| {
        b.iter(|| transition_from_unitary(black_box(&u), &bath).unwrap())
    });
    c.bench_function("svd_normal_form_k4", |b| {
        b.iter(|| svd_normal_form(black_box(&u), &bath).unwrap())
    });
    c.bench_function("dense_channel_oracle_k4", |b| {
        b.iter(|| dense_channel_oracle(black_box(&u), &bath, &rho0).unwrap())
    });
}

criterion_group!(benches, bench_cone, bench_channel, bench_bath);
criterion_main!(benches);
