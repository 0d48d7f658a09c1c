//! Finite truncated-ladder heat bath and the energy-preserving block
//! unitaries acting jointly on the qutrit and the bath.
//!
//! Bath levels sit at integer multiples of the system spacing with
//! degeneracies `d_0 <= d_1 <= ...`; the joint Hilbert space splits into
//! total-energy sectors `k = i + n` (system level `i`, bath level `n`), and
//! an energy-preserving unitary is an independent unitary per sector.

mod block;
mod counting;
mod dense;
mod normal_form;
mod uvector;

pub use block::{
    optimal_pointb_unitary, random_block_unitary, random_pointb_completion, verify_sigma_pattern,
    BlockUnitary,
};
pub use counting::{pointb_counting_coherence, pointb_counting_transition};
pub use dense::{dense_channel_oracle, embed_joint_unitary};
pub use normal_form::{normal_form_residual, svd_normal_form, NormalFormResidual};
pub use uvector::{
    apply_via_inner, coherence_from_unitary, inner, transition_from_unitary, uvector,
    uvector_inner, InducedTransition, UVector,
};

use crate::error::{Error, Result};

/// Degeneracy schedule of the bath ladder.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// `d_n = round(base^n)`
    Geometric(f64),
    Custom(Vec<usize>),
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::Geometric(b) => format!("geometric-base-{b}"),
            Scheme::Custom(_) => "custom".into(),
        }
    }
}

/// A truncated ladder bath: levels `0..=max_level` with degeneracies `d_n`
/// and per-state thermal weights `gamma_n = q^n / Z_R`,
/// `Z_R = sum d_n q^n`.
#[derive(Debug, Clone)]
pub struct BathSpec {
    q: f64,
    max_level: usize,
    degeneracies: Vec<usize>,
    per_state_weight: Vec<f64>,
    z_r: f64,
    scheme: Scheme,
}

impl BathSpec {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Highest bath level `K`.
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn degeneracy(&self, n: usize) -> usize {
        self.degeneracies[n]
    }

    pub fn degeneracies(&self) -> &[usize] {
        &self.degeneracies
    }

    /// Per-state weight `gamma_n` of one bath state at level `n`.
    pub fn weight(&self, n: usize) -> f64 {
        self.per_state_weight[n]
    }

    pub fn z_r(&self) -> f64 {
        self.z_r
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// Total bath dimension `sum d_n`.
    pub fn bath_dim(&self) -> usize {
        self.degeneracies.iter().sum()
    }

    /// Highest joint-energy sector index (`K + 2`).
    pub fn max_joint_sector(&self) -> usize {
        self.max_level + 2
    }

    /// System levels present in joint sector `k` (those with a bath partner
    /// level inside the truncation).
    pub fn sector_levels(&self, k: usize) -> Vec<usize> {
        (0..3).filter(|&i| k >= i && k - i <= self.max_level).collect()
    }

    /// Dimension of joint sector `k`.
    pub fn sector_dim(&self, k: usize) -> usize {
        self.sector_levels(k).iter().map(|&i| self.degeneracies[k - i]).sum()
    }
}

/// Builds a truncated ladder bath with `K + 1` levels.
pub fn make_bath(q: f64, max_level: usize, scheme: Scheme) -> Result<BathSpec> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} is outside (0, 1)")));
    }
    if max_level < 4 {
        return Err(Error::Domain(format!("max_level = {max_level} < 4")));
    }
    let degeneracies: Vec<usize> = match &scheme {
        Scheme::Geometric(b) => {
            if !(*b >= 1.0 && b.is_finite()) {
                return Err(Error::Domain(format!("geometric base {b} must be >= 1")));
            }
            (0..=max_level).map(|n| b.powi(n as i32).round() as usize).collect()
        }
        Scheme::Custom(d) => {
            if d.len() != max_level + 1 {
                return Err(Error::Domain(format!(
                    "custom degeneracy list has {} entries, expected {}",
                    d.len(),
                    max_level + 1
                )));
            }
            d.clone()
        }
    };
    if degeneracies.contains(&0) {
        return Err(Error::Domain("degeneracies must be positive".into()));
    }
    if degeneracies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain(format!(
            "degeneracies {degeneracies:?} are not non-decreasing"
        )));
    }
    // cumulative powers keep gamma_n = q * gamma_{n-1} exact
    let mut powers = Vec::with_capacity(max_level + 1);
    let mut p = 1.0;
    for _ in 0..=max_level {
        powers.push(p);
        p *= q;
    }
    let z_r: f64 = degeneracies.iter().zip(&powers).map(|(&d, &w)| d as f64 * w).sum();
    let per_state_weight = powers.iter().map(|&w| w / z_r).collect();
    Ok(BathSpec { q, max_level, degeneracies, per_state_weight, z_r, scheme })
}

/// How well a finite bath approximates the idealized Gibbs-scaling ladder:
/// ratio deviations, unaccounted weight, and the degeneracy-growth margin
/// that powers the gap bound.
#[derive(Debug, Clone)]
pub struct DeltaReport {
    /// Level set on which the ratio conditions are evaluated (`2..=K-2`).
    pub good_levels: Vec<usize>,
    /// `max |d_{k-m} / (d_k q^m) - 1|` over good levels and `m in {1, 2}`.
    pub delta_ratio: f64,
    /// `1 - sum_{k in good} d_k gamma_k`.
    pub delta_tail: f64,
    /// `min (d_k - d_{k-1} - d_{k-2}) / d_k` over good levels.
    pub positivity_margin: f64,
}

impl DeltaReport {
    /// Effective perturbation parameter fed to the gap bound: the larger of
    /// the ratio deviation and the tail weight.
    pub fn delta_eff(&self) -> f64 {
        self.delta_ratio.max(self.delta_tail)
    }

    /// True while `1 - q - q^2 - (q + q^2) * delta_ratio > 0`, the regime in
    /// which the degeneracy-growth argument guarantees a positive margin.
    pub fn gap_guarantee_holds(&self, q: f64) -> bool {
        1.0 - q - q * q - (q + q * q) * self.delta_ratio > 0.0
    }
}

/// Evaluates the ratio/tail/positivity diagnostics of a bath.
pub fn bath_delta_report(bath: &BathSpec) -> Result<DeltaReport> {
    let k_max = bath.max_level();
    if k_max < 4 {
        return Err(Error::Domain(format!(
            "bath with max_level = {k_max} is too small for a delta report"
        )));
    }
    let good_levels: Vec<usize> = (2..=k_max - 2).collect();
    let q = bath.q();
    let mut delta_ratio = 0.0f64;
    let mut positivity_margin = f64::INFINITY;
    let mut good_weight = 0.0;
    for &k in &good_levels {
        let dk = bath.degeneracy(k) as f64;
        for m in 1..=2usize {
            let r = bath.degeneracy(k - m) as f64 / (dk * q.powi(m as i32));
            delta_ratio = delta_ratio.max((r - 1.0).abs());
        }
        let margin = (dk - bath.degeneracy(k - 1) as f64 - bath.degeneracy(k - 2) as f64) / dk;
        positivity_margin = positivity_margin.min(margin);
        good_weight += dk * bath.weight(k);
    }
    Ok(DeltaReport { good_levels, delta_ratio, delta_tail: 1.0 - good_weight, positivity_margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_matched_base_is_exact() {
        let bath = make_bath(0.5, 6, Scheme::Geometric(2.0)).unwrap();
        assert_eq!(bath.degeneracies(), &[1, 2, 4, 8, 16, 32, 64]);
        assert!((bath.z_r() - 7.0).abs() < 1e-12);
        for n in 0..=6 {
            assert!((bath.degeneracy(n) as f64 * bath.weight(n) - 1.0 / 7.0).abs() < 1e-15);
        }
    }

    #[test]
    fn per_state_weights_scale_geometrically() {
        let bath = make_bath(0.3, 8, Scheme::Geometric(10.0 / 3.0)).unwrap();
        let mut total = 0.0;
        for n in 0..=8 {
            total += bath.degeneracy(n) as f64 * bath.weight(n);
            for m in 1..=n.min(2) {
                let rel = bath.weight(n) / (bath.q().powi(m as i32) * bath.weight(n - m)) - 1.0;
                assert!(rel.abs() < 1e-14);
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_report_matched_base() {
        let bath = make_bath(0.5, 6, Scheme::Geometric(2.0)).unwrap();
        let rep = bath_delta_report(&bath).unwrap();
        assert_eq!(rep.good_levels, vec![2, 3, 4]);
        assert!(rep.delta_ratio.abs() < 1e-13);
        assert!((rep.delta_tail - 4.0 / 7.0).abs() < 1e-12);
        assert!((rep.positivity_margin - 0.25).abs() < 1e-13);
        assert!(rep.gap_guarantee_holds(0.5));
    }

    #[test]
    fn delta_report_rounding_is_reported() {
        let bath = make_bath(0.3, 6, Scheme::Geometric(10.0 / 3.0)).unwrap();
        let rep = bath_delta_report(&bath).unwrap();
        assert!(rep.delta_ratio > 0.0, "rounded degeneracies must show a nonzero ratio deviation");
    }

    #[test]
    fn gap_guarantee_fails_above_golden_ratio() {
        let bath = make_bath(0.7, 8, Scheme::Geometric(10.0 / 7.0)).unwrap();
        let rep = bath_delta_report(&bath).unwrap();
        assert!(!rep.gap_guarantee_holds(0.7), "1 - q - q^2 < 0 at q = 0.7");
    }

    #[test]
    fn flat_degeneracies_report_large_ratio() {
        let bath = make_bath(0.5, 4, Scheme::Custom(vec![1, 1, 1, 1, 1])).unwrap();
        let rep = bath_delta_report(&bath).unwrap();
        assert!((rep.delta_ratio - (1.0 / 0.25 - 1.0)).abs() < 1e-12);
        assert!(rep.positivity_margin < 0.0);
    }

    #[test]
    fn make_bath_rejects_bad_inputs() {
        assert!(make_bath(0.5, 3, Scheme::Geometric(2.0)).is_err());
        assert!(make_bath(1.0, 6, Scheme::Geometric(2.0)).is_err());
        assert!(make_bath(0.5, 4, Scheme::Custom(vec![2, 1, 1, 1, 1])).is_err());
        assert!(make_bath(0.5, 4, Scheme::Custom(vec![1, 1, 1])).is_err());
        assert!(make_bath(0.5, 4, Scheme::Geometric(0.5)).is_err());
    }

    #[test]
    fn sector_levels_respect_truncation() {
        let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
        assert_eq!(bath.sector_levels(0), vec![0]);
        assert_eq!(bath.sector_levels(1), vec![0, 1]);
        assert_eq!(bath.sector_levels(3), vec![0, 1, 2]);
        assert_eq!(bath.sector_levels(4), vec![0, 1, 2]);
        assert_eq!(bath.sector_levels(5), vec![1, 2]);
        assert_eq!(bath.sector_levels(6), vec![2]);
        assert_eq!(bath.sector_dim(4), 16 + 8 + 4);
        assert_eq!(bath.max_joint_sector(), 6);
    }
}
