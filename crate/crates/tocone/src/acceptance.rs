//! The release gate: every headline number and every structural lemma used
//! on the way to it, executed at pinned tolerances. Shared by the
//! `acceptance` test target and the CLI `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bath::{
    coherence_from_unitary, dense_channel_oracle, make_bath, normal_form_residual,
    optimal_pointb_unitary, pointb_counting_coherence, random_block_unitary,
    random_pointb_completion, svd_normal_form, transition_from_unitary, uvector,
    verify_sigma_pattern, Scheme,
};
use crate::ento::{
    apply_channel, entry_bounds, kraus_from_transition, lp_oracle_max, max_coherence_ento,
    optimal_transition, population_feasible, sweep_cone,
};
use crate::gap::{gap_bound_main, gap_bound_refined, pointb_values};
use crate::gibbs::make_gibbs_state;
use crate::majorization::thermo_majorization_clearance;
use crate::state::DensityMatrix;

/// Criterion subsets selectable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionGroup {
    All,
    /// cone feasibility, analytics and channel synthesis (1, 3, 9, 10)
    Cone,
    /// closed forms and perturbation bounds (2, 8)
    Gap,
    /// bath unitaries, normal form and dual-path checks (4, 5, 6, 7)
    Bath,
}

impl CriterionGroup {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Self::All),
            "cone" => Some(Self::Cone),
            "gap" => Some(Self::Gap),
            "bath" => Some(Self::Bath),
            _ => None,
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

type Criterion = fn(AcceptanceConfig) -> CriterionResult;

/// Knobs for self-testing the harness; `forced_failure` flips one tolerance
/// to zero so that the suite must go red.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptanceConfig {
    pub forced_failure: bool,
}

fn group_of(id: usize) -> CriterionGroup {
    match id {
        1 | 3 | 9 | 10 => CriterionGroup::Cone,
        2 | 8 => CriterionGroup::Gap,
        _ => CriterionGroup::Bath,
    }
}

/// Runs the selected criteria in order; results carry one printable line
/// each.
pub fn run_criteria(group: CriterionGroup, config: AcceptanceConfig) -> Vec<CriterionResult> {
    let runners: [(usize, Criterion); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    runners
        .into_iter()
        .filter(|(id, _)| group == CriterionGroup::All || group_of(*id) == group)
        .map(|(_, f)| f(config))
        .collect()
}

fn result(id: usize, name: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult { id, name, passed, detail }
}

/// 1. Analytic three-case maximum vs the grid oracle on feasible lattice
///    points, `|diff| <= 1e-3` with `grid_n = 2000`, under 60 s.
pub fn criterion_1(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-3 };
    let start = std::time::Instant::now();
    let lattice = 25usize;
    let steps = (lattice - 1) as f64;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for q in [0.1, 0.3, 0.5] {
        let points: Vec<(f64, f64)> = (0..lattice * lattice)
            .filter_map(|idx| {
                let p0 = (idx / lattice) as f64 / steps;
                let p1 = (idx % lattice) as f64 / steps;
                if p0 + p1 > 1.0 {
                    return None;
                }
                population_feasible(q, p0, p1).unwrap().then_some((p0, p1))
            })
            .collect();
        checked += points.len();
        let w = points
            .par_iter()
            .map(|&(p0, p1)| {
                let analytic = max_coherence_ento(q, p0, p1).unwrap().rho10_max;
                let oracle = lp_oracle_max(q, p0, p1, 2000).unwrap();
                (analytic - oracle).abs()
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(w);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst <= tol && elapsed <= 60.0;
    result(
        1,
        "analytic-vs-oracle",
        passed,
        format!("worst |analytic - oracle| = {worst:.2e} over {checked} feasible points in {elapsed:.1} s"),
    )
}

/// 2. Point-(b) closed forms at q = 0.5 within 1e-7.
pub fn criterion_2(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-7 };
    let v = pointb_values(0.5).unwrap();
    let errs = [
        (v.ento_max - 0.4330127f64).abs(),
        (v.to_max - 0.375f64).abs(),
        (v.delta10 - 0.0580127f64).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    result(
        2,
        "pointb-closed-forms",
        worst <= tol,
        format!(
            "ento = {:.7}, to = {:.7}, gap = {:.7}; worst deviation {worst:.1e}",
            v.ento_max, v.to_max, v.delta10
        ),
    )
}

/// 3. Synthesized channels on 100 random feasible lattice points:
///    trace-preserving, covariant, Gibbs-preserving and attaining the analytic
///    maximum, all within 1e-12.
pub fn criterion_3(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-12 };
    let q = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rho0 = DensityMatrix::psi01_plus();
    let gibbs = make_gibbs_state(q).unwrap();
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 100 {
        let p0: f64 = rng.gen();
        let p1: f64 = rng.gen_range(0.0..(1.0 - p0));
        if !population_feasible(q, p0, p1).unwrap() {
            continue;
        }
        n += 1;
        let rec = max_coherence_ento(q, p0, p1).unwrap();
        let g = optimal_transition(q, p0, p1).unwrap();
        let ch = kraus_from_transition(&g).unwrap();
        worst = worst.max(ch.trace_preservation_residual());
        let out = apply_channel(&ch, &rho0).unwrap();
        worst = worst.max((out.entry(1, 0).norm() - rec.rho10_max).abs());
        let pops = out.populations();
        worst = worst
            .max((pops[0] - p0).abs())
            .max((pops[1] - p1).abs())
            .max((pops[2] - (1.0 - p0 - p1)).abs());
        // Gibbs preservation
        worst = worst.max(apply_channel(&ch, &gibbs).unwrap().max_abs_diff(&gibbs));
        // covariance: commute with free evolution
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = apply_channel(&ch, &rho0.time_translate(t)).unwrap();
        let b = apply_channel(&ch, &rho0).unwrap().time_translate(t);
        worst = worst.max(a.max_abs_diff(&b));
    }
    result(
        3,
        "channel-synthesis",
        worst <= tol,
        format!("worst residual {worst:.2e} over 100 feasible points"),
    )
}

/// 4. Dense partial trace vs inner-product reconstruction, 50 random
///    unitaries and states at K = 4, entrywise within 1e-10.
pub fn criterion_4(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-10 };
    let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
    let worst = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let u = random_block_unitary(&bath, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD1CE);
            let rho = random_density(&mut rng);
            let dense = dense_channel_oracle(&u, &bath, &rho).unwrap();
            let inner = crate::bath::apply_via_inner(&u, &bath, &rho).unwrap();
            dense.max_abs_diff(&inner)
        })
        .reduce(|| 0.0, f64::max);
    result(
        4,
        "dual-path-equivalence",
        worst <= tol,
        format!("worst entrywise gap {worst:.2e} over 50 samples"),
    )
}

/// 5. Optimal point-(b) unitary: per-sector unitarity within 1e-12, sigma
///    pattern, and the truncated coherence `1/2 [1 - q^2 (K-1)/(K+1)]` for the
///    matched geometric bath at K in {6, 10, 14} via the counting path.
pub fn criterion_5(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-12 };
    let bath6 = make_bath(0.5, 6, Scheme::Geometric(2.0)).unwrap();
    let u = optimal_pointb_unitary(&bath6).unwrap();
    let unitarity = u.unitarity_residual();
    let sigma_ok = verify_sigma_pattern(&u, &bath6).unwrap();
    let rho0 = DensityMatrix::psi01_plus();
    let block_coh = coherence_from_unitary(&u, &bath6, &rho0).unwrap();
    let mut worst = unitarity.max((block_coh - 0.4107142857142857f64).abs());
    let mut prev_err = f64::INFINITY;
    let mut converging = true;
    for k in [6usize, 10, 14] {
        let bath = make_bath(0.5, k, Scheme::Geometric(2.0)).unwrap();
        let c = pointb_counting_coherence(&bath);
        let want = 0.5 * (1.0 - 0.25 * (k as f64 - 1.0) / (k as f64 + 1.0));
        worst = worst.max((c - want).abs());
        let err = (c - 0.375f64).abs();
        converging &= err < prev_err;
        prev_err = err;
    }
    let passed = worst <= tol && sigma_ok && converging;
    result(
        5,
        "optimal-pointb-unitary",
        passed,
        format!(
            "unitarity {unitarity:.1e}, sigma pattern {sigma_ok}, K=6 coherence {block_coh:.10}, converging {converging}"
        ),
    )
}

/// 6. Normal form on 200 random unitaries at K = 4: diagonal ordered
///    nonnegative main blocks, transition preservation within 1e-10,
///    coherence non-decrease within 1e-12, Pythagorean residual within 1e-10.
pub fn criterion_6(config: AcceptanceConfig) -> CriterionResult {
    let (tol_a, tol_b, tol_c) = if config.forced_failure {
        (0.0, 0.0, 0.0)
    } else {
        (1e-10, 1e-10, 1e-12)
    };
    let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
    let rho0 = DensityMatrix::psi01_plus();
    let fails: usize = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let u = random_block_unitary(&bath, seed).unwrap();
            let nf = svd_normal_form(&u, &bath).unwrap();
            let r = normal_form_residual(&nf, &bath);
            let diag_ok = r.off_diagonal <= tol_a && r.non_real <= tol_a && r.ordering <= tol_a;
            let t_ok = transition_from_unitary(&u, &bath)
                .unwrap()
                .matrix
                .max_abs_diff(&transition_from_unitary(&nf, &bath).unwrap().matrix)
                <= tol_b;
            let c0 = coherence_from_unitary(&u, &bath, &rho0).unwrap();
            let c1 = coherence_from_unitary(&nf, &bath, &rho0).unwrap();
            let c_ok = c1 >= c0 - tol_c;
            let v00 = uvector(&nf, &bath, 0, 0).unwrap();
            let v11 = uvector(&nf, &bath, 1, 1).unwrap();
            let (p00, p11) = (v00.norm_sq(), v11.norm_sq());
            let c = crate::bath::inner(&v00, &v11).unwrap().re;
            let alpha = c / p11;
            let mu: f64 = v00
                .entries
                .iter()
                .zip(v11.entries.iter())
                .map(|(m0, m1)| {
                    m0.iter().zip(m1.iter()).map(|(e0, e1)| (e0 - e1 * alpha).norm_sqr()).sum::<f64>()
                })
                .sum();
            let pyth_ok = (p00 * p11 - c * c - p11 * mu).abs() <= 1e-10;
            usize::from(!(diag_ok && t_ok && c_ok && pyth_ok))
        })
        .sum();
    result(
        6,
        "svd-normal-form",
        fails == 0,
        format!("{} of 200 samples violated a normal-form property", fails),
    )
}

/// 7. Fifty random unitary completions of the point-(b) zero pattern all
///    show the forced singular-value pattern.
pub fn criterion_7(config: AcceptanceConfig) -> CriterionResult {
    let bath = make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap();
    let fails: usize = (1..=50u64)
        .into_par_iter()
        .map(|seed| {
            let u = random_pointb_completion(&bath, seed).unwrap();
            let ok = !config.forced_failure
                && u.unitarity_residual() < 1e-12
                && verify_sigma_pattern(&u, &bath).unwrap();
            usize::from(!ok)
        })
        .sum();
    result(
        7,
        "forced-sigma-pattern",
        fails == 0,
        format!("{} of 50 completions escaped the forced pattern", fails),
    )
}

/// 8. Gap bounds: frozen values at q = 0.5 within 1e-9, `f(q) < 8` and
///    `bound <= exact gap` on a 100-point grid in (0, 0.618).
pub fn criterion_8(config: AcceptanceConfig) -> CriterionResult {
    let tol = if config.forced_failure { 0.0 } else { 1e-9 };
    let main = gap_bound_main(0.5, 0.0, 0.0).unwrap();
    let (refined, _) = gap_bound_refined(0.5, 0.0, 0.0).unwrap();
    let worst = (main - 0.001121824f64).abs().max((refined - 0.001295372f64).abs());
    let mut grid_ok = true;
    for i in 1..=100 {
        let q = i as f64 / 101.0 * 0.618;
        let gap = pointb_values(q).unwrap().delta10;
        let b = gap_bound_main(q, 0.0, 0.0).unwrap();
        let (_, f_q) = gap_bound_refined(q, 0.0, 0.0).unwrap();
        grid_ok &= f_q < 8.0 && b <= gap + 1e-12;
    }
    result(
        8,
        "gap-bounds",
        worst <= tol && grid_ok,
        format!("main = {main:.9}, refined = {refined:.9}, grid checks {grid_ok}"),
    )
}

/// 9. Interval feasibility agrees with the Lorenz-curve oracle on every
///    non-boundary simplex point of a 50x50 lattice at q in {0.3, 0.5}.
pub fn criterion_9(config: AcceptanceConfig) -> CriterionResult {
    let boundary = 1e-9;
    let p_in = [0.5, 0.5, 0.0];
    let mut disagreements = 0usize;
    let mut compared = 0usize;
    for q in [0.3, 0.5] {
        let lattice = 50usize;
        let steps = (lattice - 1) as f64;
        for idx in 0..lattice * lattice {
            let p0 = (idx / lattice) as f64 / steps;
            let p1 = (idx % lattice) as f64 / steps;
            if p0 + p1 > 1.0 - boundary {
                continue;
            }
            let b = entry_bounds(q, p0, p1).unwrap();
            let r =
                thermo_majorization_clearance(q, &p_in, &[p0, p1, 1.0 - p0 - p1]).unwrap();
            if b.min_slack().abs() < boundary || r.clearance.abs() < boundary {
                continue; // within 1e-9 of a facet
            }
            compared += 1;
            let agree = !config.forced_failure && (b.feasible == r.reachable);
            disagreements += usize::from(!agree);
        }
    }
    result(
        9,
        "reachability-oracles",
        disagreements == 0,
        format!("{disagreements} disagreements over {compared} interior points"),
    )
}

/// 10. The q = 0.5 cone at grid 200: connected convex feasible region
///     containing point (b), global maximum 1/2 at the lattice point nearest
///     (1/2, 1/2), and neighbor continuity.
pub fn criterion_10(config: AcceptanceConfig) -> CriterionResult {
    let grid = 200usize;
    let q = 0.5;
    let records = sweep_cone(q, grid).unwrap();
    let feasible: Vec<bool> = records.iter().map(|r| r.feasible()).collect();
    let at = |i: usize, j: usize| feasible[i * grid + j];

    // connectivity by flood fill over 4-adjacency
    let total_feasible = feasible.iter().filter(|&&f| f).count();
    let start = feasible.iter().position(|&f| f);
    let mut seen = vec![false; grid * grid];
    let mut reached = 0usize;
    if let Some(s) = start {
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(idx) = stack.pop() {
            reached += 1;
            let (i, j) = (idx / grid, idx % grid);
            let mut push = |ni: usize, nj: usize| {
                let nidx = ni * grid + nj;
                if feasible[nidx] && !seen[nidx] {
                    seen[nidx] = true;
                    stack.push(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < grid {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < grid {
                push(i, j + 1);
            }
        }
    }
    let connected = reached == total_feasible && total_feasible > 0;

    // convexity proxy: every row and column of the mask is contiguous
    let contiguous = |line: &mut dyn Iterator<Item = bool>| {
        let mut runs = 0;
        let mut prev = false;
        for f in line {
            if f && !prev {
                runs += 1;
            }
            prev = f;
        }
        runs <= 1
    };
    let mut convex = true;
    for i in 0..grid {
        convex &= contiguous(&mut (0..grid).map(|j| at(i, j)));
        convex &= contiguous(&mut (0..grid).map(|j| at(j, i)));
    }

    // point (b) lies inside the region; it sits on the p1 = 1/2 facet, so
    // the check is the exact point plus a feasible lattice point in its cell
    let steps = (grid - 1) as f64;
    let (pb0, pb1) = ((1.0 - q * q) / 2.0, 0.5);
    let near_b = records.iter().any(|r| {
        r.feasible() && (r.p0 - pb0).abs() <= 1.5 / steps && (r.p1 - pb1).abs() <= 1.5 / steps
    });
    let contains_b = population_feasible(q, pb0, pb1).unwrap() && near_b;

    // global max at the nearest feasible lattice point to (1/2, 1/2)
    let best = records
        .iter()
        .filter(|r| r.feasible())
        .max_by(|a, b| a.rho10_max.partial_cmp(&b.rho10_max).unwrap())
        .unwrap();
    let dist2 = |r: &crate::ento::ConeRecord| {
        (r.p0 - 0.5) * (r.p0 - 0.5) + (r.p1 - 0.5) * (r.p1 - 0.5)
    };
    let min_dist2 = records
        .iter()
        .filter(|r| r.feasible())
        .map(&dist2)
        .fold(f64::INFINITY, f64::min);
    let max_at_center = dist2(best) <= min_dist2 + 1e-12
        && (best.rho10_max - 0.5).abs() <= 2.0 / grid as f64;

    // Neighbor continuity. The boundary value sqrt(G00* G11*)/2 has a
    // square-root cusp where an optimizer component vanishes at a facet, so
    // the adjacent-step envelope scales as 1/sqrt(grid), not 1/grid. The
    // envelope is pinned to the fitted value at grid 50 (step <= 5/50)
    // carried over with that scaling: step <= 5 / sqrt(50 * grid).
    let mut max_step = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
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
    }
    let step_cap = if config.forced_failure { 0.0 } else { 5.0 / (50.0 * grid as f64).sqrt() };
    let continuous = max_step <= step_cap;

    let passed = connected && convex && contains_b && max_at_center && continuous;
    result(
        10,
        "cone-figure",
        passed,
        format!(
            "connected {connected}, convex {convex}, contains point (b) {contains_b}, \
             max {:.4} at ({:.3}, {:.3}), step {max_step:.4} (cap {step_cap:.4})",
            best.rho10_max, best.p0, best.p1
        ),
    )
}

fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let mut a = nalgebra::Matrix3::<num_complex::Complex64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            a[(i, j)] =
                num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let m = a * a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.map(|e| e / tr)).unwrap()
}
