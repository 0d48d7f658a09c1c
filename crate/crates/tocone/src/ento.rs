//! Reachable-state cone of the input `(|0> + |1>)/sqrt(2)` under covariant
//! Gibbs-preserving channels: the feasible region of transition-matrix
//! entries, the analytic three-case coherence maximum, the Kraus channel
//! that attains it, and a brute-force grid oracle.
//!
//! With the population constraint `G (1/2, 1/2, 0)^T = (p0, p1, 1-p0-p1)^T`
//! and the Gibbs fixed-point condition `G (1, q, q^2)^T = (1, q, q^2)^T`,
//! every entry of `G` is a linear function of `x = G[0][0]` and
//! `y = G[1][1]`:
//!
//! ```text
//! G01 = 2 p0 - x            G02 = (1 - 2 q p0 - (1-q) x) / q^2
//! G10 = 2 p1 - y            G12 = (q - 2 p1 + (1-q) y) / q^2
//! G2j = 1 - G0j - G1j
//! ```
//!
//! Requiring all nine entries to lie in `[0, 1]` yields interval bounds on
//! `x`, on `y` and on `x - y`, which are necessary and sufficient.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs::{GibbsVector, TransitionMatrix};
use crate::state::{DensityMatrix, TOL_ALGEBRA};

pub use crate::majorization::{thermo_majorization_clearance, thermo_majorization_reachable};

/// Slack used when classifying feasibility of exact-boundary points.
const FEAS_TOL: f64 = 1e-12;
/// Entry tolerance for the oracle's reconstruct-and-check verification.
const ORACLE_TOL: f64 = 1e-9;

/// Interval bounds on `(G00, G11)` and on their difference for a fixed
/// output population.
#[derive(Debug, Clone, Copy)]
pub struct EntryBounds {
    pub g00_lo: f64,
    pub g00_hi: f64,
    pub g11_lo: f64,
    pub g11_hi: f64,
    /// bounds on `G00 - G11`
    pub diff_lo: f64,
    pub diff_hi: f64,
    pub feasible: bool,
}

impl EntryBounds {
    /// Smallest slack among the five feasibility inequalities; negative for
    /// infeasible populations. Used to detect points near a cone facet.
    pub fn min_slack(&self) -> f64 {
        let s = [
            self.g00_hi - self.g00_lo,
            self.g11_hi - self.g11_lo,
            self.diff_hi - self.diff_lo,
            (self.g00_hi - self.g11_lo) - self.diff_lo,
            self.diff_hi - (self.g00_lo - self.g11_hi),
        ];
        s.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn check_population_domain(q: f64, p0: f64, p1: f64) -> Result<GibbsVector> {
    let gv = GibbsVector::new(q)?;
    if p0 < -FEAS_TOL || p1 < -FEAS_TOL || p0 + p1 > 1.0 + FEAS_TOL {
        return Err(Error::Domain(format!(
            "(p0, p1) = ({p0}, {p1}) is not a valid population simplex point"
        )));
    }
    Ok(gv)
}

/// Necessary-and-sufficient bounds on `(G00, G11)` for converting the input
/// population `(1/2, 1/2, 0)` into `(p0, p1, 1-p0-p1)` with a
/// Gibbs-stochastic matrix.
pub fn entry_bounds(q: f64, p0: f64, p1: f64) -> Result<EntryBounds> {
    check_population_domain(q, p0, p1)?;
    let omq = 1.0 - q;

    let g00_hi = (2.0 * p0).min(1.0).min((1.0 - 2.0 * q * p0) / omq);
    let g00_lo = 0.0f64.max(2.0 * p0 - 1.0).max((1.0 - 2.0 * q * p0 - q * q) / omq);
    let g11_hi = (2.0 * p1).min(1.0).min((q * q + 2.0 * p1 - q) / omq);
    let g11_lo = 0.0f64.max(2.0 * p1 - 1.0).max((2.0 * p1 - q) / omq);

    let s = q * p0 + p1;
    let diff_lo = (-2.0 * p1).max(2.0 * p0 - 1.0).max((1.0 - 2.0 * s) / omq + q);
    let diff_hi = (1.0 - 2.0 * p1).min(2.0 * p0).min((1.0 + q - 2.0 * s) / omq);

    let mut b = EntryBounds { g00_lo, g00_hi, g11_lo, g11_hi, diff_lo, diff_hi, feasible: false };
    b.feasible = b.min_slack() >= -FEAS_TOL;
    Ok(b)
}

/// True iff some Gibbs-stochastic matrix maps the input population onto
/// `(p0, p1, 1-p0-p1)`; the population footprint of the cone.
pub fn population_feasible(q: f64, p0: f64, p1: f64) -> Result<bool> {
    Ok(entry_bounds(q, p0, p1)?.feasible)
}

/// Which branch of the analytic maximization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// Both entry upper bounds attainable simultaneously.
    Case1,
    /// The difference lower bound binds; `G11* = G00_hi - diff_lo`.
    Case2,
    /// The difference upper bound binds; `G00* = G11_hi + diff_hi`.
    Case3,
    Infeasible,
}

impl CaseId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::Case1 => "case1",
            CaseId::Case2 => "case2",
            CaseId::Case3 => "case3",
            CaseId::Infeasible => "infeasible",
        }
    }
}

/// One point of a cone sweep: the population, the maximal preserved
/// coherence and the optimizing entries.
#[derive(Debug, Clone, Copy)]
pub struct ConeRecord {
    pub q: f64,
    pub p0: f64,
    pub p1: f64,
    pub rho10_max: f64,
    pub case_id: CaseId,
    pub g00_star: f64,
    pub g11_star: f64,
}

impl ConeRecord {
    pub fn feasible(&self) -> bool {
        self.case_id != CaseId::Infeasible
    }

    fn infeasible(q: f64, p0: f64, p1: f64) -> Self {
        ConeRecord {
            q,
            p0,
            p1,
            rho10_max: 0.0,
            case_id: CaseId::Infeasible,
            g00_star: 0.0,
            g11_star: 0.0,
        }
    }
}

/// Analytic maximum of `|rho'[1][0]| = sqrt(G00 G11)/2` over the feasible
/// region, by the three-case corner analysis. Boundary ties resolve to
/// case 1; the value is continuous across case boundaries either way.
pub fn max_coherence_ento(q: f64, p0: f64, p1: f64) -> Result<ConeRecord> {
    let b = entry_bounds(q, p0, p1)?;
    if !b.feasible {
        return Ok(ConeRecord::infeasible(q, p0, p1));
    }
    let diff = b.g00_hi - b.g11_hi;
    let (case_id, g00_star, g11_star) = if b.diff_lo <= diff && diff <= b.diff_hi {
        (CaseId::Case1, b.g00_hi, b.g11_hi)
    } else if b.diff_lo > diff {
        (CaseId::Case2, b.g00_hi, b.g00_hi - b.diff_lo)
    } else {
        (CaseId::Case3, b.g11_hi + b.diff_hi, b.g11_hi)
    };
    let rho10_max = 0.5 * (g00_star.max(0.0) * g11_star.max(0.0)).sqrt();
    Ok(ConeRecord { q, p0, p1, rho10_max, case_id, g00_star, g11_star })
}

/// Reconstructs all nine entries of `G` from `(x, y) = (G00, G11)`.
fn reconstruct_entries(q: f64, p0: f64, p1: f64, x: f64, y: f64) -> Matrix3<f64> {
    let q2 = q * q;
    let g01 = 2.0 * p0 - x;
    let g10 = 2.0 * p1 - y;
    let g02 = (1.0 - 2.0 * q * p0 - (1.0 - q) * x) / q2;
    let g12 = (q - 2.0 * p1 + (1.0 - q) * y) / q2;
    let g20 = 1.0 - x - g10;
    let g21 = 1.0 - g01 - y;
    let g22 = 1.0 - g02 - g12;
    Matrix3::new(x, g01, g02, g10, y, g12, g20, g21, g22)
}

fn entries_in_unit_interval(m: &Matrix3<f64>, tol: f64) -> bool {
    m.iter().all(|&e| (-tol..=1.0 + tol).contains(&e))
}

/// Brute-force oracle for the coherence maximum: scans a `grid_n x grid_n`
/// lattice over the `(G00, G11)` bounding box, keeping points whose nine
/// reconstructed entries all lie in `[0, 1]`; facet intersections of the
/// difference band are probed in addition to the lattice so degenerate
/// regions are not missed. Returns -1 when no candidate is feasible.
pub fn lp_oracle_max(q: f64, p0: f64, p1: f64, grid_n: usize) -> Result<f64> {
    if grid_n < 100 {
        return Err(Error::Domain(format!("grid_n = {grid_n} < 100")));
    }
    let b = entry_bounds(q, p0, p1)?;
    if b.g00_lo > b.g00_hi + FEAS_TOL || b.g11_lo > b.g11_hi + FEAS_TOL {
        return Ok(-1.0);
    }
    let feasible = |x: f64, y: f64| -> bool {
        entries_in_unit_interval(&reconstruct_entries(q, p0, p1, x, y), ORACLE_TOL)
    };
    let value = |x: f64, y: f64| 0.5 * (x.max(0.0) * y.max(0.0)).sqrt();

    let mut best = -1.0f64;
    let steps = (grid_n - 1) as f64;
    let span_x = b.g00_hi - b.g00_lo;
    let span_y = b.g11_hi - b.g11_lo;
    for ix in 0..grid_n {
        let x = b.g00_lo + span_x * ix as f64 / steps;
        // For fixed x the feasible y-set is an interval, so the first
        // feasible y scanning downward is the column maximum, and the
        // objective is increasing in y.
        for iy in (0..grid_n).rev() {
            let y = b.g11_lo + span_y * iy as f64 / steps;
            if feasible(x, y) {
                best = best.max(value(x, y));
                break;
            }
        }
        // band facets at this x
        for y in [x - b.diff_lo, x - b.diff_hi] {
            if (b.g11_lo - ORACLE_TOL..=b.g11_hi + ORACLE_TOL).contains(&y) && feasible(x, y) {
                best = best.max(value(x, y));
            }
        }
    }
    // band facets along the top edge of the box
    for x in [b.g11_hi + b.diff_hi, b.g11_hi + b.diff_lo] {
        if (b.g00_lo - ORACLE_TOL..=b.g00_hi + ORACLE_TOL).contains(&x) && feasible(x, b.g11_hi) {
            best = best.max(value(x, b.g11_hi));
        }
    }
    Ok(best)
}

/// Full optimal transition matrix, reconstructed from the analytic
/// `(G00*, G11*)` via the linear entry relations.
pub fn optimal_transition(q: f64, p0: f64, p1: f64) -> Result<TransitionMatrix> {
    let rec = max_coherence_ento(q, p0, p1)?;
    if !rec.feasible() {
        return Err(Error::Domain(format!(
            "population ({p0}, {p1}) is not reachable at q = {q}"
        )));
    }
    let mut m = reconstruct_entries(q, p0, p1, rec.g00_star, rec.g11_star);
    for e in m.iter_mut() {
        if !(-1e-10..=1.0 + 1e-10).contains(e) {
            return Err(Error::Inconsistency(format!(
                "reconstructed entry {e} escapes [0, 1] at ({p0}, {p1})"
            )));
        }
        // snap exact-boundary roundoff so the matrix invariants hold
        *e = e.clamp(0.0, 1.0);
    }
    TransitionMatrix::new(m)
}

/// A covariant channel given by five Kraus operators, one per coherence
/// mode: `K(n) = sum_{i-j=n} sqrt(G[i][j]) |i><j|`.
#[derive(Debug, Clone)]
pub struct EntoChannel {
    kraus: [Matrix3<C64>; 5],
    source: TransitionMatrix,
}

impl EntoChannel {
    /// Kraus operator of mode `n in -2..=2`.
    pub fn kraus(&self, n: i32) -> &Matrix3<C64> {
        assert!((-2..=2).contains(&n), "mode index out of range");
        &self.kraus[(n + 2) as usize]
    }

    pub fn source(&self) -> &TransitionMatrix {
        &self.source
    }

    /// Max-norm residual of `sum K(n)^dag K(n) = I`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut s: Matrix3<C64> = Matrix3::zeros();
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        let mut r = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                r = r.max((s[(i, j)] - want).norm());
            }
        }
        r
    }
}

/// Builds the mode-resolved Kraus channel of a Gibbs-stochastic matrix.
pub fn kraus_from_transition(g: &TransitionMatrix) -> Result<EntoChannel> {
    let mut kraus = [Matrix3::zeros(); 5];
    for i in 0..3usize {
        for j in 0..3usize {
            let e = g.entry(i, j);
            if e < -TOL_ALGEBRA {
                return Err(Error::Domain(format!("negative transition entry G[{i}][{j}] = {e}")));
            }
            let n = i as i32 - j as i32;
            kraus[(n + 2) as usize][(i, j)] = C64::new(e.max(0.0).sqrt(), 0.0);
        }
    }
    Ok(EntoChannel { kraus, source: g.clone() })
}

/// Kraus-sum evaluation `sum_n K(n) rho K(n)^dag`.
pub fn apply_channel(channel: &EntoChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out: Matrix3<C64> = Matrix3::zeros();
    for k in 0..5 {
        let kr = &channel.kraus[k];
        out += kr * rho.entries() * kr.adjoint();
    }
    DensityMatrix::new(out)
}

/// Evaluates the analytic maximum on a `grid x grid` lattice over
/// `[0, 1]^2` (row-major in `p0`), marking unreachable and off-simplex
/// points as infeasible records.
pub fn sweep_cone(q: f64, grid: usize) -> Result<Vec<ConeRecord>> {
    if grid < 2 {
        return Err(Error::Domain(format!("grid = {grid} < 2")));
    }
    GibbsVector::new(q)?;
    let steps = (grid - 1) as f64;
    let records: Vec<ConeRecord> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let i = idx / grid;
            let j = idx % grid;
            let p0 = i as f64 / steps;
            let p1 = j as f64 / steps;
            if p0 + p1 > 1.0 + FEAS_TOL {
                return ConeRecord::infeasible(q, p0, p1);
            }
            max_coherence_ento(q, p0, p1).expect("lattice point is inside the domain")
        })
        .collect();
    Ok(records)
}
