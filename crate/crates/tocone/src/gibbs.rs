//! Gibbs vectors, Gibbs-stochastic transition matrices and the universal
//! output-coherence bound.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, TOL_ALGEBRA};

/// Thermal weights `(1, q, q^2)` of the qutrit at Boltzmann ratio
/// `q = exp(-beta * spacing)`, together with their normalization.
#[derive(Debug, Clone, Copy)]
pub struct GibbsVector {
    q: f64,
    weights: [f64; 3],
    z: f64,
}

impl GibbsVector {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q = {q} is outside (0, 1)")));
        }
        let weights = [1.0, q, q * q];
        Ok(Self { q, weights, z: 1.0 + q + q * q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Unnormalized weights `(1, q, q^2)`.
    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Normalized thermal populations.
    pub fn populations(&self) -> [f64; 3] {
        [self.weights[0] / self.z, self.weights[1] / self.z, self.weights[2] / self.z]
    }
}

/// The thermal state `diag(1, q, q^2) / (1 + q + q^2)`.
pub fn make_gibbs_state(q: f64) -> Result<DensityMatrix> {
    let gv = GibbsVector::new(q)?;
    let p = gv.populations();
    let m = Matrix3::from_diagonal(&Vector3::new(
        C64::new(p[0], 0.0),
        C64::new(p[1], 0.0),
        C64::new(p[2], 0.0),
    ));
    DensityMatrix::new(m)
}

/// A 3x3 column-stochastic matrix of transition probabilities
/// `G[i][j] = p(i|j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: Matrix3<f64>,
}

impl TransitionMatrix {
    /// Validates entry ranges and column sums.
    pub fn new(entries: Matrix3<f64>) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let e = entries[(i, j)];
                if !(-TOL_ALGEBRA..=1.0 + TOL_ALGEBRA).contains(&e) {
                    return Err(Error::Structure(format!(
                        "entry G[{i}][{j}] = {e} is outside [0, 1]"
                    )));
                }
            }
        }
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| entries[(i, j)]).sum();
            if (s - 1.0).abs() > TOL_ALGEBRA {
                return Err(Error::Structure(format!("column {j} sums to {s}, not 1")));
            }
        }
        Ok(Self { entries })
    }

    /// Validates additionally that the matrix fixes the Gibbs vector of `q`.
    pub fn new_gibbs(entries: Matrix3<f64>, q: f64) -> Result<Self> {
        let g = Self::new(entries)?;
        let r = g.gibbs_residual(q)?;
        if r > TOL_ALGEBRA {
            return Err(Error::Structure(format!(
                "Gibbs vector is not fixed: residual {r:.3e}"
            )));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self { entries: Matrix3::identity() }
    }

    pub fn entries(&self) -> &Matrix3<f64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Max-norm residual of `G gamma = gamma` with `gamma = (1, q, q^2)`.
    pub fn gibbs_residual(&self, q: f64) -> Result<f64> {
        let gv = GibbsVector::new(q)?;
        let w = gv.weights();
        let mut r = 0.0f64;
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| self.entries[(i, j)] * w[j]).sum();
            r = r.max((s - w[i]).abs());
        }
        Ok(r)
    }

    /// Largest deviation of a column sum from 1.
    pub fn column_sum_residual(&self) -> f64 {
        (0..3)
            .map(|j| ((0..3).map(|i| self.entries[(i, j)]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Population dynamics `p' = G p`.
    pub fn apply_populations(&self, p: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| (0..3).map(|j| self.entries[(i, j)] * p[j]).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.entries[(i, j)] - other.entries[(i, j)]).abs());
            }
        }
        d
    }
}

/// Upper bound on the output coherence `|rho'[i][j]|` of any covariant
/// Gibbs-preserving channel with population dynamics `G` applied to `rho0`:
/// the primed sum `sum |rho0[c][d]| sqrt(G[i][c] G[j][d])` over index pairs
/// with `c - d = i - j`.
pub fn coherence_bound(
    rho0: &DensityMatrix,
    g: &TransitionMatrix,
    i: usize,
    j: usize,
) -> Result<f64> {
    if i == j {
        return Err(Error::Argument(
            "coherence bound applies to off-diagonal entries only (i != j)".into(),
        ));
    }
    if i > 2 || j > 2 {
        return Err(Error::Argument(format!("indices ({i}, {j}) out of range")));
    }
    let mode = i as i32 - j as i32;
    let mut bound = 0.0;
    for c in 0..3usize {
        for d in 0..3usize {
            if c as i32 - d as i32 != mode {
                continue;
            }
            let w = g.entry(i, c) * g.entry(j, d);
            // guard tiny negative roundoff from reconstructed matrices
            bound += rho0.entry(c, d).norm() * w.max(0.0).sqrt();
        }
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gibbs_state_values() {
        let rho = make_gibbs_state(0.5).unwrap();
        let p = rho.populations();
        assert!((p[0] - 4.0 / 7.0).abs() < 1e-15);
        assert!((p[1] - 2.0 / 7.0).abs() < 1e-15);
        assert!((p[2] - 1.0 / 7.0).abs() < 1e-15);

        let rho = make_gibbs_state(0.3).unwrap();
        let p = rho.populations();
        assert!((p[0] - 1.0 / 1.39).abs() < 1e-15);
        assert!((p[1] - 0.3 / 1.39).abs() < 1e-15);
        assert!((p[2] - 0.09 / 1.39).abs() < 1e-15);
    }

    #[test]
    fn gibbs_state_infinite_temperature_limit() {
        let rho = make_gibbs_state(0.999999).unwrap();
        for p in rho.populations() {
            assert!((p - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn gibbs_state_domain() {
        assert!(make_gibbs_state(0.0).is_err());
        assert!(make_gibbs_state(1.0).is_err());
        assert!(make_gibbs_state(-0.2).is_err());
        assert!(make_gibbs_state(1.7).is_err());
    }

    #[test]
    fn gibbs_vector_is_decreasing() {
        let gv = GibbsVector::new(0.7).unwrap();
        let w = gv.weights();
        assert!(w[0] > w[1] && w[1] > w[2] && w[2] > 0.0);
        assert!((gv.z() - w.iter().sum::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn transition_matrix_validation() {
        assert!(TransitionMatrix::new(Matrix3::identity()).is_ok());
        let bad = Matrix3::new(1.2, 0.0, 0.0, -0.2, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(TransitionMatrix::new(bad).is_err());
        let bad_sum = Matrix3::new(0.5, 0.0, 0.0, 0.4, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(TransitionMatrix::new(bad_sum).is_err());
    }

    /// The point-(b) matrix at q = 0.5.
    fn g_point_b() -> TransitionMatrix {
        let m = Matrix3::new(0.75, 0.0, 1.0, 0.0, 1.0, 0.0, 0.25, 0.0, 0.0);
        TransitionMatrix::new_gibbs(m, 0.5).unwrap()
    }

    #[test]
    fn point_b_matrix_is_gibbs_stochastic() {
        let g = g_point_b();
        assert!(g.gibbs_residual(0.5).unwrap() < 1e-15);
        assert_eq!(g.column_sum_residual(), 0.0);
    }

    #[test]
    fn coherence_bound_point_b() {
        let rho0 = DensityMatrix::psi01_plus();
        let g = g_point_b();
        let b = coherence_bound(&rho0, &g, 1, 0).unwrap();
        assert!((b - 0.5 * 0.75f64.sqrt()).abs() < 1e-15);
        assert!((b - 0.4330127018922193).abs() < 1e-9);
        // no 2-quantum coherence in rho0
        assert_eq!(coherence_bound(&rho0, &g, 2, 0).unwrap(), 0.0);
        // G[2][1] * G[1][0] = 0
        assert_eq!(coherence_bound(&rho0, &g, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn coherence_bound_rejects_diagonal() {
        let rho0 = DensityMatrix::psi01_plus();
        let g = TransitionMatrix::identity();
        assert!(matches!(coherence_bound(&rho0, &g, 1, 1), Err(Error::Argument(_))));
    }
}
