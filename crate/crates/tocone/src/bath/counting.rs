//! Counting path: channel quantities of the point-(b) construction
//! evaluated from degeneracy arithmetic alone. Valid because every trace of
//! that unitary's blocks reduces to a difference of degeneracies, so large
//! truncations are reachable without materializing any matrix.

use nalgebra::Matrix3;

use crate::bath::uvector::InducedTransition;
use crate::bath::BathSpec;
use crate::error::Result;
use crate::gibbs::TransitionMatrix;

/// `Tr(M00^k)` of the point-(b) unitary: `d_k` below the coupled sectors,
/// `d_k - d_{k-2}` beyond.
fn trace_m00(bath: &BathSpec, k: usize) -> f64 {
    if k < 2 {
        bath.degeneracy(k) as f64
    } else {
        (bath.degeneracy(k) - bath.degeneracy(k - 2)) as f64
    }
}

/// Preserved coherence of the point-(b) unitary,
/// `sum_k gamma_k Tr(M00^k) / 2`; equals `(1 - q^2 (K-1)/(K+1)) / 2` for a
/// geometric bath with base `1/q`.
pub fn pointb_counting_coherence(bath: &BathSpec) -> f64 {
    let half_sum: f64 =
        (0..=bath.max_level()).map(|k| bath.weight(k) * trace_m00(bath, k)).sum();
    0.5 * half_sum
}

/// Full truncated transition matrix of the point-(b) unitary from
/// degeneracy sums. The middle column is exact; column 2 carries the
/// truncation boundary weight on `G[2][2]`.
pub fn pointb_counting_transition(bath: &BathSpec) -> Result<InducedTransition> {
    let k_max = bath.max_level();
    let g00: f64 = (0..=k_max).map(|k| bath.weight(k) * trace_m00(bath, k)).sum();
    let g20: f64 = (2..=k_max).map(|k| bath.weight(k) * bath.degeneracy(k - 2) as f64).sum();
    let g02: f64 =
        (2..=k_max).map(|k| bath.weight(k - 2) * bath.degeneracy(k - 2) as f64).sum();
    // boundary sectors K+1, K+2 keep level 2 on an identity block
    let g22: f64 = (k_max + 1..=k_max + 2)
        .map(|k| bath.weight(k - 2) * bath.degeneracy(k - 2) as f64)
        .sum();
    let m = Matrix3::new(g00, 0.0, g02, 0.0, 1.0, 0.0, g20, 0.0, g22);
    let matrix = TransitionMatrix::new(m)?;
    let gibbs_residual = matrix.gibbs_residual(bath.q())?;
    Ok(InducedTransition { matrix, gibbs_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{make_bath, optimal_pointb_unitary, transition_from_unitary, Scheme};
    use crate::bath::coherence_from_unitary;
    use crate::state::DensityMatrix;

    #[test]
    fn counting_matches_closed_form_for_matched_base() {
        for k in [6usize, 10, 14] {
            let bath = make_bath(0.5, k, Scheme::Geometric(2.0)).unwrap();
            let want = 0.5 * (1.0 - 0.25 * (k as f64 - 1.0) / (k as f64 + 1.0));
            let got = pointb_counting_coherence(&bath);
            assert!((got - want).abs() < 1e-13, "K = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn counting_matches_block_evaluation_at_small_k() {
        let bath = make_bath(0.5, 6, Scheme::Geometric(2.0)).unwrap();
        let u = optimal_pointb_unitary(&bath).unwrap();
        let rho0 = DensityMatrix::psi01_plus();
        let c_blocks = coherence_from_unitary(&u, &bath, &rho0).unwrap();
        let c_count = pointb_counting_coherence(&bath);
        assert!((c_blocks - c_count).abs() < 1e-13);

        let t_blocks = transition_from_unitary(&u, &bath).unwrap();
        let t_count = pointb_counting_transition(&bath).unwrap();
        assert!(t_blocks.matrix.max_abs_diff(&t_count.matrix) < 1e-12);
        assert!((t_blocks.gibbs_residual - t_count.gibbs_residual).abs() < 1e-12);
    }

    #[test]
    fn counting_converges_toward_the_infinite_bath() {
        for (q, base) in [(0.5, 2.0), (0.25, 4.0)] {
            let q2 = q * q;
            let mut prev = f64::INFINITY;
            for k in [6usize, 10, 14, 20, 40] {
                let bath = make_bath(q, k, Scheme::Geometric(base)).unwrap();
                let c = pointb_counting_coherence(&bath);
                let err = (c - 0.5 * (1.0 - q2)).abs();
                assert!(err <= q2 * 2.0 / (k as f64 + 1.0) + 1e-13, "q = {q}, K = {k}");
                assert!(err < prev);
                prev = err;
            }
        }
    }
}
