//! The inner-product formalism for channels induced by block unitaries.
//!
//! For system levels `i, j` the vector `U_ij` collects the weighted
//! sub-blocks `sqrt(gamma_{k-j}) u[i][j]^k` over sectors `k`; with the
//! trace inner product `(A, B) = sum_l Tr(A_l^dag B_l)` the induced channel
//! has matrix elements `<i| E(|j><j'|) |i'> = (U_i'j', U_ij)` whenever
//! `i - i' = j - j'`, and in particular `G[i][j] = (U_ij, U_ij)`.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64 as C64;

use crate::bath::{BathSpec, BlockUnitary};
use crate::error::{Error, Result};
use crate::gibbs::TransitionMatrix;
use crate::state::DensityMatrix;

/// The weighted sub-block family of one `(i, j)` pair. Entry `l` holds
/// `sqrt(gamma_{k-j}) u[i][j]^k` with `k = max(i, j) + l`.
#[derive(Debug, Clone)]
pub struct UVector {
    pub i: usize,
    pub j: usize,
    pub start_k: usize,
    pub entries: Vec<DMatrix<C64>>,
}

impl UVector {
    /// Squared norm; equals the transition probability `p(i|j)`.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|m| m.iter().map(|e| e.norm_sqr()).sum::<f64>()).sum()
    }
}

/// Builds the vector of weighted sub-blocks for `(i, j)`.
pub fn uvector(u: &BlockUnitary, bath: &BathSpec, i: usize, j: usize) -> Result<UVector> {
    if i > 2 || j > 2 {
        return Err(Error::Argument(format!("system levels ({i}, {j}) out of range")));
    }
    let start_k = i.max(j);
    let end_k = bath.max_level() + i.min(j);
    let mut entries = Vec::with_capacity(end_k + 1 - start_k);
    for k in start_k..=end_k {
        let blk = u
            .block(k, i, j)
            .ok_or_else(|| Error::Inconsistency(format!("missing block u[{i}][{j}]^{k}")))?;
        let w = bath.weight(k - j).sqrt();
        entries.push(blk.map(|e| e * w));
    }
    Ok(UVector { i, j, start_k, entries })
}

/// Trace inner product `(a, b) = sum_l Tr(a_l^dag b_l)`, defined for pairs
/// on the same coherence mode (`a.i - b.i = a.j - b.j`), pairing entries
/// position by position from each vector's own starting sector.
pub fn inner(a: &UVector, b: &UVector) -> Result<C64> {
    if a.i as i32 - b.i as i32 != a.j as i32 - b.j as i32 {
        return Err(Error::Argument(format!(
            "mode mismatch: ({}, {}) vs ({}, {})",
            a.i, a.j, b.i, b.j
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (ma, mb) in a.entries.iter().zip(b.entries.iter()) {
        debug_assert_eq!(ma.shape(), mb.shape());
        for (ea, eb) in ma.iter().zip(mb.iter()) {
            acc += ea.conj() * eb;
        }
    }
    Ok(acc)
}

/// Channel matrix element `<i| E(|j><j'|) |i'> = (U_i'j', U_ij)`; the
/// argument order follows that reading.
pub fn uvector_inner(
    u: &BlockUnitary,
    bath: &BathSpec,
    ij: (usize, usize),
    i1j1: (usize, usize),
) -> Result<C64> {
    let a = uvector(u, bath, i1j1.0, i1j1.1)?;
    let b = uvector(u, bath, ij.0, ij.1)?;
    inner(&a, &b)
}

/// A transition matrix obtained from a block unitary, together with the
/// Gibbs-preservation residual caused by the truncation boundary.
#[derive(Debug, Clone)]
pub struct InducedTransition {
    pub matrix: TransitionMatrix,
    pub gibbs_residual: f64,
}

/// Population dynamics `G[i][j] = (U_ij, U_ij)` of the induced channel.
/// Column sums are exactly 1 by sector unitarity; Gibbs preservation holds
/// only up to the truncation boundary and is reported alongside.
pub fn transition_from_unitary(u: &BlockUnitary, bath: &BathSpec) -> Result<InducedTransition> {
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = uvector(u, bath, i, j)?.norm_sq();
        }
    }
    let matrix = TransitionMatrix::new(m)?;
    let gibbs_residual = matrix.gibbs_residual(bath.q())?;
    Ok(InducedTransition { matrix, gibbs_residual })
}

/// Preserved coherence `|rho'[1][0]| = |(U_00, U_11)| / 2` for the input
/// `(|0> + |1>)/sqrt(2)`.
pub fn coherence_from_unitary(u: &BlockUnitary, bath: &BathSpec, rho0: &DensityMatrix) -> Result<f64> {
    if rho0.max_abs_diff(&DensityMatrix::psi01_plus()) > 1e-12 {
        return Err(Error::Domain(
            "coherence_from_unitary expects the reference input (|0> + |1>)/sqrt(2)".into(),
        ));
    }
    Ok(0.5 * uvector_inner(u, bath, (1, 1), (0, 0))?.norm())
}

/// Full output state assembled from inner products, the counterpart of the
/// dense partial-trace oracle.
pub fn apply_via_inner(u: &BlockUnitary, bath: &BathSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = Matrix3::zeros();
    for i in 0..3usize {
        for i1 in 0..3usize {
            let mode = i as i32 - i1 as i32;
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..3usize {
                for j1 in 0..3usize {
                    if j as i32 - j1 as i32 != mode {
                        continue;
                    }
                    let amp = rho.entry(j, j1);
                    if amp.norm() == 0.0 {
                        continue;
                    }
                    acc += amp * uvector_inner(u, bath, (i, j), (i1, j1))?;
                }
            }
            out[(i, i1)] = acc;
        }
    }
    // symmetrize roundoff so the constructor's Hermiticity gate passes
    let herm = (out + out.adjoint()).map(|e| e * 0.5);
    DensityMatrix::new(herm)
}
