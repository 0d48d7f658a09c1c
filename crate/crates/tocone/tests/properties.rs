//! Cross-module invariants exercised on seeded random samples.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tocone::ento::{
    apply_channel, entry_bounds, kraus_from_transition, max_coherence_ento, optimal_transition,
    population_feasible, sweep_cone,
};
use tocone::gibbs::{coherence_bound, make_gibbs_state};
use tocone::state::phase_normal_form;
use tocone::{DensityMatrix, TransitionMatrix};

/// Draws a random feasible population and a random feasible `(G00, G11)`
/// inside its bounding box, reconstructing the full matrix through the
/// optimal-transition path at the box corner or by rejection sampling.
fn random_gibbs_stochastic(q: f64, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    loop {
        let p0: f64 = rng.gen();
        let p1: f64 = rng.gen_range(0.0..(1.0 - p0));
        if !population_feasible(q, p0, p1).unwrap() {
            continue;
        }
        let b = entry_bounds(q, p0, p1).unwrap();
        for _ in 0..64 {
            let x = rng.gen_range(b.g00_lo..=b.g00_hi.max(b.g00_lo + f64::MIN_POSITIVE));
            let y = rng.gen_range(b.g11_lo..=b.g11_hi.max(b.g11_lo + f64::MIN_POSITIVE));
            if x - y < b.diff_lo || x - y > b.diff_hi {
                continue;
            }
            // reconstruct through the shared linear relations
            let q2 = q * q;
            let m = Matrix3::new(
                x,
                2.0 * p0 - x,
                (1.0 - 2.0 * q * p0 - (1.0 - q) * x) / q2,
                2.0 * p1 - y,
                y,
                (q - 2.0 * p1 + (1.0 - q) * y) / q2,
                1.0 - x - (2.0 * p1 - y),
                1.0 - (2.0 * p0 - x) - y,
                0.0,
            );
            let mut m = m;
            m[(2, 2)] = 1.0 - m[(0, 2)] - m[(1, 2)];
            if m.iter().any(|&e| !(-1e-12..=1.0 + 1e-12).contains(&e)) {
                continue;
            }
            let m = m.map(|e| e.clamp(0.0, 1.0));
            if let Ok(g) = TransitionMatrix::new_gibbs(m, q) {
                return g;
            }
        }
        // box corner always works as a fallback
        return optimal_transition(q, p0, p1).unwrap();
    }
}

fn random_two_mode_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    // mix of a random pure two-mode state and the maximally mixed state
    let a0 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let a1 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let a2 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (a0.norm_sqr() + a1.norm_sqr() + a2.norm_sqr()).sqrt();
    let v = [a0 / n, a1 / n, a2 / n];
    let lam: f64 = rng.gen_range(0.2..0.8);
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = v[i] * v[j].conj() * lam;
        }
    }
    for i in 0..3 {
        m[(i, i)] += C64::new((1.0 - lam) / 3.0, 0.0);
    }
    DensityMatrix::new(m).unwrap()
}

#[test]
fn output_coherence_never_exceeds_the_bound() {
    let rho0 = DensityMatrix::psi01_plus();
    for q in [0.3, 0.5, 0.7] {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let g = random_gibbs_stochastic(q, &mut rng);
            let ch = kraus_from_transition(&g).unwrap();
            let out = apply_channel(&ch, &rho0).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let bound = coherence_bound(&rho0, &g, i, j).unwrap();
                    assert!(
                        out.entry(i, j).norm() <= bound + 1e-10,
                        "q = {q}, ({i}, {j}): {} > {bound}",
                        out.entry(i, j).norm()
                    );
                }
            }
        }
    }
}

#[test]
fn synthesized_channel_saturates_the_bound() {
    let rho0 = DensityMatrix::psi01_plus();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let q = rng.gen_range(0.05..0.95);
        let p0: f64 = rng.gen();
        let p1: f64 = rng.gen_range(0.0..(1.0 - p0));
        if !population_feasible(q, p0, p1).unwrap() {
            continue;
        }
        let g = optimal_transition(q, p0, p1).unwrap();
        let ch = kraus_from_transition(&g).unwrap();
        let out = apply_channel(&ch, &rho0).unwrap();
        let bound = coherence_bound(&rho0, &g, 1, 0).unwrap();
        assert!((out.entry(1, 0).norm() - bound).abs() < 1e-12);
        assert!(
            (out.entry(1, 0).norm() - max_coherence_ento(q, p0, p1).unwrap().rho10_max).abs()
                < 1e-12
        );
    }
}

#[test]
fn channels_commute_with_free_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let q = rng.gen_range(0.1..0.9);
        let g = random_gibbs_stochastic(q, &mut rng);
        let ch = kraus_from_transition(&g).unwrap();
        let rho = random_two_mode_state(&mut rng);
        let t = rng.gen_range(-6.0..6.0);
        let a = apply_channel(&ch, &rho.time_translate(t)).unwrap();
        let b = apply_channel(&ch, &rho).unwrap().time_translate(t);
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn channels_preserve_the_gibbs_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let q = rng.gen_range(0.1..0.9);
        let g = random_gibbs_stochastic(q, &mut rng);
        let ch = kraus_from_transition(&g).unwrap();
        let gibbs = make_gibbs_state(q).unwrap();
        let out = apply_channel(&ch, &gibbs).unwrap();
        assert!(out.max_abs_diff(&gibbs) < 1e-12);
    }
}

#[test]
fn channel_outputs_admit_the_phase_normal_form() {
    // outputs of covariant channels on the reference input stay in the
    // two-mode family, so the normal form applies
    let rho0 = DensityMatrix::psi01_plus();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let q = rng.gen_range(0.1..0.9);
        let g = random_gibbs_stochastic(q, &mut rng);
        let ch = kraus_from_transition(&g).unwrap();
        let out = apply_channel(&ch, &rho0.time_translate(rng.gen_range(0.0..6.0))).unwrap();
        let (nf, _) = phase_normal_form(&out).unwrap();
        assert!(nf.entry(1, 0).re >= -1e-15);
        assert!(nf.entry(2, 1).re >= -1e-15);
    }
}

#[test]
fn cone_sweep_is_continuous_and_convex_at_grid_50() {
    for q in [0.3, 0.5] {
        let grid = 50usize;
        let records = sweep_cone(q, grid).unwrap();
        let at = |i: usize, j: usize| records[i * grid + j].feasible();
        let mut max_step = 0.0f64;
        for i in 0..grid {
            let mut runs_row = 0;
            let mut prev_row = false;
            for j in 0..grid {
                if at(i, j) && !prev_row {
                    runs_row += 1;
                }
                prev_row = at(i, j);
                if !at(i, j) {
                    continue;
                }
                let v = records[i * grid + j].rho10_max;
                if i + 1 < grid && at(i + 1, j) {
                    max_step = max_step.max((records[(i + 1) * grid + j].rho10_max - v).abs());
                }
                if j + 1 < grid && at(i, j + 1) {
                    max_step = max_step.max((records[i * grid + j + 1].rho10_max - v).abs());
                }
            }
            assert!(runs_row <= 1, "row {i} of the feasible mask is not contiguous");
        }
        assert!(
            max_step * grid as f64 <= 5.0,
            "q = {q}: fitted continuity constant {} > 5",
            max_step * grid as f64
        );
    }
}

#[test]
fn sampled_unitaries_induce_stochastic_transitions() {
    use tocone::bath::{make_bath, random_block_unitary, transition_from_unitary, Scheme};
    let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
    for seed in 0..100u64 {
        let u = random_block_unitary(&bath, seed).unwrap();
        let t = transition_from_unitary(&u, &bath).unwrap();
        assert!(t.matrix.column_sum_residual() < 1e-10, "seed {seed}");
        assert!(
            t.matrix.entries().iter().all(|&e| (-1e-10..=1.0 + 1e-10).contains(&e)),
            "seed {seed}"
        );
    }
}

#[test]
fn sweep_contains_point_b_and_identity_point() {
    let q = 0.5;
    let grid = 50usize;
    let records = sweep_cone(q, grid).unwrap();
    let steps = (grid - 1) as f64;
    // point (b) sits on the p1 = 1/2 facet; a feasible lattice point exists
    // in its cell
    let (pb0, pb1) = ((1.0 - q * q) / 2.0, 0.5);
    assert!(population_feasible(q, pb0, pb1).unwrap());
    assert!(records.iter().any(|r| {
        r.feasible() && (r.p0 - pb0).abs() <= 1.5 / steps && (r.p1 - pb1).abs() <= 1.5 / steps
    }));
    // off-simplex corner is marked infeasible, not an error
    let corner = &records[grid * grid - 1];
    assert!(!corner.feasible());
    assert_eq!(corner.case_id, tocone::CaseId::Infeasible);
}
