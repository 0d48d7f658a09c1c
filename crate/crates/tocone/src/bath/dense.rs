//! Dense partial-trace oracle: embeds the sector blocks into the full
//! joint space, conjugates `rho (x) gamma_R` explicitly and traces out the
//! bath. Independent of the inner-product path, and the reference for it.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64 as C64;

use crate::bath::{BathSpec, BlockUnitary};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Dense guard on the joint dimension `3 * sum d_n`.
const DENSE_GUARD: usize = 2000;

/// Joint basis ordering: system level major, then bath level, then
/// degeneracy index.
fn joint_index(bath: &BathSpec, level: usize, bath_level: usize, s: usize) -> usize {
    let b: usize = bath.bath_dim();
    let offset: usize = (0..bath_level).map(|n| bath.degeneracy(n)).sum();
    level * b + offset + s
}

/// Embeds all sector blocks into one joint-space unitary.
pub fn embed_joint_unitary(u: &BlockUnitary, bath: &BathSpec) -> Result<DMatrix<C64>> {
    let dim = 3 * bath.bath_dim();
    if dim > DENSE_GUARD {
        return Err(Error::Resource(format!(
            "joint dimension {dim} exceeds the dense guard {DENSE_GUARD}; reduce the bath max level"
        )));
    }
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..=bath.max_joint_sector() {
        let sector = u.sector(k);
        for (pi, &i) in sector.levels.iter().enumerate() {
            for (pj, &j) in sector.levels.iter().enumerate() {
                for r in 0..sector.dims[pi] {
                    for c in 0..sector.dims[pj] {
                        let e = sector.matrix[(sector.offsets[pi] + r, sector.offsets[pj] + c)];
                        out[(joint_index(bath, i, k - i, r), joint_index(bath, j, k - j, c))] = e;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Tr_R[U (rho (x) gamma_R) U^dag]` computed with explicit matrices.
pub fn dense_channel_oracle(
    u: &BlockUnitary,
    bath: &BathSpec,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let joint_u = embed_joint_unitary(u, bath)?;
    let b = bath.bath_dim();
    let dim = 3 * b;

    // rho (x) gamma_R with gamma_R diagonal
    let mut joint = DMatrix::<C64>::zeros(dim, dim);
    let mut bath_weight = Vec::with_capacity(b);
    for n in 0..=bath.max_level() {
        for _ in 0..bath.degeneracy(n) {
            bath_weight.push(bath.weight(n));
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let e = rho.entry(i, j);
            if e.norm() == 0.0 {
                continue;
            }
            for r in 0..b {
                joint[(i * b + r, j * b + r)] = e * bath_weight[r];
            }
        }
    }

    let evolved = &joint_u * joint * joint_u.adjoint();

    let mut out = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..b {
                acc += evolved[(i * b + r, j * b + r)];
            }
            out[(i, j)] = acc;
        }
    }
    let herm = (out + out.adjoint()).map(|e| e * 0.5);
    DensityMatrix::new(herm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{
        apply_via_inner, make_bath, optimal_pointb_unitary, random_block_unitary,
        transition_from_unitary, Scheme,
    };
    use rand::{Rng, SeedableRng};

    fn random_density(rng: &mut rand_chacha::ChaCha8Rng) -> DensityMatrix {
        let mut a = Matrix3::<C64>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let m = a * a.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.map(|e| e / tr)).unwrap()
    }

    #[test]
    fn identity_is_the_identity_channel() {
        let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
        let u = BlockUnitary::identity(&bath);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let rho = random_density(&mut rng);
            let out = dense_channel_oracle(&u, &bath, &rho).unwrap();
            assert!(out.max_abs_diff(&rho) < 1e-13);
        }
    }

    #[test]
    fn dense_guard_triggers() {
        let bath = make_bath(0.5, 10, Scheme::Geometric(2.0)).unwrap();
        let u = optimal_pointb_unitary(&bath).unwrap();
        let rho = DensityMatrix::psi01_plus();
        assert!(matches!(
            dense_channel_oracle(&u, &bath, &rho),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn dense_agrees_with_inner_products_for_pointb() {
        let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
        let u = optimal_pointb_unitary(&bath).unwrap();
        let rho0 = DensityMatrix::psi01_plus();
        let dense = dense_channel_oracle(&u, &bath, &rho0).unwrap();
        let viainner = apply_via_inner(&u, &bath, &rho0).unwrap();
        assert!(dense.max_abs_diff(&viainner) < 1e-10);
        let t = transition_from_unitary(&u, &bath).unwrap();
        let pops = t.matrix.apply_populations(&rho0.populations());
        for (got, want) in dense.populations().iter().zip(&pops) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_agrees_with_inner_products_for_random_samples() {
        let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for seed in 0..10u64 {
            let u = random_block_unitary(&bath, seed).unwrap();
            let rho = random_density(&mut rng);
            let dense = dense_channel_oracle(&u, &bath, &rho).unwrap();
            let viainner = apply_via_inner(&u, &bath, &rho).unwrap();
            assert!(dense.max_abs_diff(&viainner) < 1e-10, "seed {seed}");
        }
    }
}
