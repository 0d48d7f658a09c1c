//! Qutrit density matrices and the covariant primitives acting on them:
//! coherence-mode decomposition, phase normal form and free time evolution.
//!
//! The system Hamiltonian is fixed to `H = diag(0, 1, 2)` in units where the
//! level spacing is 1, so the energy gap between levels `i` and `j` is the
//! integer `i - j` and coherence modes are indexed by that difference.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (Hermiticity, trace, eigenvalues).
pub const TOL_ALGEBRA: f64 = 1e-12;
/// Tolerance for channel-level checks.
pub const TOL_CHANNEL: f64 = 1e-10;

/// A 3x3 Hermitian, positive-semidefinite, unit-trace complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix3<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness
    /// (eigenvalues are allowed to be negative by at most `1e-12`).
    pub fn new(entries: Matrix3<C64>) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let d = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if d > TOL_ALGEBRA {
                    return Err(Error::Structure(format!(
                        "not Hermitian: |rho[{i}][{j}] - conj(rho[{j}][{i}])| = {d:.3e}"
                    )));
                }
            }
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TOL_ALGEBRA || trace.im.abs() > TOL_ALGEBRA {
            return Err(Error::Structure(format!("trace {trace} is not 1")));
        }
        // Hermitize exactly before the eigenvalue check so roundoff in the
        // input cannot leak into complex eigenvalues.
        let herm = hermitize(&entries);
        let eigs = herm.symmetric_eigenvalues();
        if eigs.iter().any(|&e| e < -TOL_ALGEBRA) {
            return Err(Error::Structure(format!(
                "negative eigenvalue {:.3e}",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(Self { entries })
    }

    /// The pure state (|0> + |1>)/sqrt(2) used as the reference input
    /// throughout the cone computations.
    pub fn psi01_plus() -> Self {
        let h = C64::new(0.5, 0.0);
        let z = C64::new(0.0, 0.0);
        let m = Matrix3::new(h, h, z, h, h, z, z, z, z);
        Self { entries: m }
    }

    pub fn entries(&self) -> &Matrix3<C64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    /// Diagonal (population) vector.
    pub fn populations(&self) -> [f64; 3] {
        [
            self.entries[(0, 0)].re,
            self.entries[(1, 1)].re,
            self.entries[(2, 2)].re,
        ]
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let eigs = hermitize(&self.entries).symmetric_eigenvalues();
        let mut v = [eigs[0], eigs[1], eigs[2]];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Splits the state into coherence modes: mode `m` collects the entries
    /// `rho[i][j]` with `i - j = m`. Summing all modes reproduces the state
    /// entry for entry.
    pub fn mode_decompose(&self) -> ModeDecomposition {
        let mut modes = [Matrix3::zeros(); 5];
        for i in 0..3 {
            for j in 0..3 {
                let m = i as i32 - j as i32;
                modes[(m + 2) as usize][(i, j)] = self.entries[(i, j)];
            }
        }
        ModeDecomposition { modes }
    }

    /// Free evolution `exp(-iHt) rho exp(iHt)` with `H = diag(0, 1, 2)`:
    /// entry `(i, j)` picks up the phase `exp(-i (i-j) t)`.
    pub fn time_translate(&self, t: f64) -> Self {
        let mut out = self.entries;
        for i in 0..3 {
            for j in 0..3 {
                let m = i as f64 - j as f64;
                out[(i, j)] *= C64::from_polar(1.0, -m * t);
            }
        }
        Self { entries: out }
    }

    /// Largest entrywise distance to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        d
    }
}

/// (rho + rho^dagger)/2, exact for already-Hermitian inputs.
fn hermitize(m: &Matrix3<C64>) -> Matrix3<C64> {
    (m + m.adjoint()).map(|e| e * 0.5)
}

/// Coherence modes of a qutrit state, indexed by the level difference
/// `m in -2..=2`.
#[derive(Debug, Clone)]
pub struct ModeDecomposition {
    modes: [Matrix3<C64>; 5],
}

impl ModeDecomposition {
    pub fn mode(&self, m: i32) -> &Matrix3<C64> {
        assert!((-2..=2).contains(&m), "mode index out of range");
        &self.modes[(m + 2) as usize]
    }

    /// Entrywise sum of all modes.
    pub fn reconstruct(&self) -> Matrix3<C64> {
        let mut out = Matrix3::zeros();
        for m in &self.modes {
            out += m;
        }
        out
    }
}

/// Rotates a two-mode state into the representative with real nonnegative
/// `rho[1][0]` and `rho[2][1]` using the covariant unitary
/// `U = diag(exp(-i phi1), 1, exp(i phi2))`. Populations, entry moduli and
/// the eigenvalue multiset are unchanged.
///
/// Returns the rotated state together with the phases `(phi1, phi2)` of the
/// original `rho[1][0]` and `rho[2][1]`.
pub fn phase_normal_form(rho: &DensityMatrix) -> Result<(DensityMatrix, (f64, f64))> {
    let r20 = rho.entry(2, 0).norm();
    if r20 > TOL_CHANNEL {
        return Err(Error::Structure(format!(
            "rho[2][0] = {r20:.3e} is nonzero; state is outside the reachable two-mode family"
        )));
    }
    let r10 = rho.entry(1, 0);
    let r21 = rho.entry(2, 1);
    let phi1 = if r10.norm() == 0.0 { 0.0 } else { r10.arg() };
    let phi2 = if r21.norm() == 0.0 { 0.0 } else { r21.arg() };

    let u = [C64::from_polar(1.0, phi1), C64::new(1.0, 0.0), C64::from_polar(1.0, -phi2)];
    let mut out = *rho.entries();
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] = u[i] * rho.entry(i, j) * u[j].conj();
        }
    }
    // The rotated off-diagonals are real up to roundoff; drop the residue so
    // downstream exact comparisons see clean zeros.
    out[(1, 0)] = C64::new(out[(1, 0)].re, 0.0);
    out[(0, 1)] = C64::new(out[(0, 1)].re, 0.0);
    out[(2, 1)] = C64::new(out[(2, 1)].re, 0.0);
    out[(1, 2)] = C64::new(out[(1, 2)].re, 0.0);
    Ok((DensityMatrix::new(out)?, (phi1, phi2)))
}
