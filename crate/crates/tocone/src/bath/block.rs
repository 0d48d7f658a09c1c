//! Energy-sector block unitaries: random sampling, the optimal
//! coherence-preserving construction for the point-(b) population dynamics,
//! and the forced singular-value pattern check.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bath::BathSpec;
use crate::error::{Error, Result};

/// Guard on `sum_k dim(sector_k)^2` for dense per-sector sampling.
const SAMPLING_GUARD: usize = 10_000_000;
/// Zero-pattern tolerance for the sigma-pattern precondition.
const PATTERN_TOL: f64 = 1e-10;
/// Tolerance on the forced singular values themselves.
const SIGMA_TOL: f64 = 1e-8;

/// One total-energy sector of a joint unitary: the present system levels,
/// the per-level bath dimensions, and the dense sector matrix in
/// system-major order.
#[derive(Debug, Clone)]
pub struct Sector {
    pub k: usize,
    pub levels: Vec<usize>,
    pub dims: Vec<usize>,
    pub offsets: Vec<usize>,
    pub matrix: DMatrix<C64>,
}

impl Sector {
    fn level_pos(&self, level: usize) -> Option<usize> {
        self.levels.iter().position(|&l| l == level)
    }

    /// Sub-block `u[i][j]` of the sector, if both levels are present.
    pub fn block(&self, i: usize, j: usize) -> Option<DMatrix<C64>> {
        let (pi, pj) = (self.level_pos(i)?, self.level_pos(j)?);
        Some(
            self.matrix
                .view((self.offsets[pi], self.offsets[pj]), (self.dims[pi], self.dims[pj]))
                .into_owned(),
        )
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max-norm residual of `U^dag U = I` on this sector.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                r = r.max((prod[(i, j)] - want).norm());
            }
        }
        r
    }
}

/// A family of energy-sector unitaries `{U(k)}`, `k = 0..=K+2`.
#[derive(Debug, Clone)]
pub struct BlockUnitary {
    sectors: Vec<Sector>,
}

impl BlockUnitary {
    pub(crate) fn from_sectors(sectors: Vec<Sector>) -> Self {
        Self { sectors }
    }

    /// The identity on every sector; induces the identity channel.
    pub fn identity(bath: &BathSpec) -> Self {
        let sectors = (0..=bath.max_joint_sector())
            .map(|k| {
                let mut s = empty_sector(bath, k);
                s.matrix.fill_diagonal(C64::new(1.0, 0.0));
                s
            })
            .collect();
        Self { sectors }
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, k: usize) -> &Sector {
        &self.sectors[k]
    }

    pub fn num_sectors(&self) -> usize {
        self.sectors.len()
    }

    /// Sub-block `u[i][j]` of sector `k`, if present.
    pub fn block(&self, k: usize, i: usize, j: usize) -> Option<DMatrix<C64>> {
        self.sectors.get(k)?.block(i, j)
    }

    /// Worst per-sector unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        self.sectors.iter().map(Sector::unitarity_residual).fold(0.0, f64::max)
    }
}

/// Lays out the sector structure of `k` with zero entries.
pub(crate) fn empty_sector(bath: &BathSpec, k: usize) -> Sector {
    let levels = bath.sector_levels(k);
    let dims: Vec<usize> = levels.iter().map(|&i| bath.degeneracy(k - i)).collect();
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in &dims {
        offsets.push(acc);
        acc += d;
    }
    Sector { k, levels, dims, offsets, matrix: DMatrix::zeros(acc, acc) }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    // Box-Muller; u1 in (0, 1] avoids ln(0)
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * th.cos(), r * th.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Thin QR with the phase convention that makes the factor Haar-distributed
/// for Gaussian input: columns are rescaled so the R diagonal is positive.
fn orthonormalize(m: DMatrix<C64>) -> DMatrix<C64> {
    let cols = m.ncols();
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..cols {
        let d = r[(c, c)];
        let ph = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for row in 0..q.nrows() {
            q[(row, c)] *= ph;
        }
    }
    q
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    orthonormalize(ginibre(n, n, rng))
}

fn sector_rng(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn check_sampling_guard(bath: &BathSpec) -> Result<()> {
    let cost: usize = (0..=bath.max_joint_sector()).map(|k| bath.sector_dim(k).pow(2)).sum();
    if cost > SAMPLING_GUARD {
        return Err(Error::Resource(format!(
            "sector mass {cost} exceeds the dense sampling guard {SAMPLING_GUARD}; reduce the bath max level"
        )));
    }
    Ok(())
}

/// Independent Haar-distributed unitary on every sector, deterministic for
/// a fixed seed.
pub fn random_block_unitary(bath: &BathSpec, seed: u64) -> Result<BlockUnitary> {
    check_sampling_guard(bath)?;
    let sectors = (0..=bath.max_joint_sector())
        .map(|k| {
            let mut s = empty_sector(bath, k);
            let mut rng = sector_rng(seed, k);
            s.matrix = haar_unitary(s.dim(), &mut rng);
            s
        })
        .collect();
    Ok(BlockUnitary::from_sectors(sectors))
}

/// Random unitary completion of the point-(b) zero pattern: in every full
/// sector only `u00`, `u11`, `u02`, `u20` are populated (`u22 = 0`), with
/// Haar-random factors subject to unitarity. Sample 0 of any Monte Carlo
/// run should be [`optimal_pointb_unitary`] itself; this produces the rest
/// of the family.
pub fn random_pointb_completion(bath: &BathSpec, seed: u64) -> Result<BlockUnitary> {
    check_sampling_guard(bath)?;
    let k_max = bath.max_level();
    let sectors = (0..=bath.max_joint_sector())
        .map(|k| {
            let mut s = empty_sector(bath, k);
            let mut rng = sector_rng(seed, k);
            if k < 2 || k > k_max {
                // outside the full sectors the pattern keeps levels decoupled
                let mut acc = 0;
                for &d in &s.dims.clone() {
                    let u = haar_unitary(d, &mut rng);
                    s.matrix.view_mut((acc, acc), (d, d)).copy_from(&u);
                    acc += d;
                }
                return s;
            }
            let (a, b, c) = (s.dims[0], s.dims[1], s.dims[2]);
            // middle block: independent unitary
            let u11 = haar_unitary(b, &mut rng);
            s.matrix.view_mut((a, a), (b, b)).copy_from(&u11);
            // level-2 columns: [u02; 0] with orthonormal columns
            let q2 = orthonormalize(ginibre(a, c, &mut rng));
            s.matrix.view_mut((0, a + b), (a, c)).copy_from(&q2);
            // level-0 columns: [u00; u20], a random orthonormal completion of
            // the orthogonal complement of the level-2 columns
            let mut m = ginibre(a + c, a, &mut rng);
            let mut emb = DMatrix::zeros(a + c, c);
            emb.view_mut((0, 0), (a, c)).copy_from(&q2);
            m -= &emb * (emb.adjoint() * &m);
            let q0 = orthonormalize(m);
            s.matrix.view_mut((0, 0), (a, a)).copy_from(&q0.view((0, 0), (a, a)));
            s.matrix.view_mut((a + b, 0), (c, a)).copy_from(&q0.view((a, 0), (c, a)));
            s
        })
        .collect();
    Ok(BlockUnitary::from_sectors(sectors))
}

/// The coherence-optimal unitary for the point-(b) transition matrix:
/// `u11` blocks are identities, `u00` carries `d_k - d_{k-2}` unit singular
/// values, and the `0 <-> 2` coupling places identities in the rows where
/// `u00` vanishes. Boundary sectors above the truncation keep the present
/// levels decoupled with identities.
pub fn optimal_pointb_unitary(bath: &BathSpec) -> Result<BlockUnitary> {
    let k_max = bath.max_level();
    for k in 2..=k_max {
        if bath.degeneracy(k) < bath.degeneracy(k - 2) {
            return Err(Error::Domain(format!(
                "degeneracy d_{k} < d_{}; construction needs a non-decreasing ladder",
                k - 2
            )));
        }
    }
    let one = C64::new(1.0, 0.0);
    let sectors = (0..=bath.max_joint_sector())
        .map(|k| {
            let mut s = empty_sector(bath, k);
            if k < 2 || k > k_max {
                s.matrix.fill_diagonal(one);
                return s;
            }
            let (a, b, c) = (s.dims[0], s.dims[1], s.dims[2]);
            let keep = a - c; // d_k - d_{k-2}
            for t in 0..keep {
                s.matrix[(t, t)] = one; // unit singular values of u00
            }
            for t in 0..b {
                s.matrix[(a + t, a + t)] = one; // u11 = I
            }
            for t in 0..c {
                s.matrix[(keep + t, a + b + t)] = one; // u02 in the zero rows
                s.matrix[(a + b + t, keep + t)] = one; // u20, matching columns
            }
            s
        })
        .collect();
    Ok(BlockUnitary::from_sectors(sectors))
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Checks the forced singular-value pattern of the point-(b) family: after
/// verifying the zero pattern (structure error if absent), returns true iff
/// every full sector's `u00` has exactly `d_k - d_{k-2}` unit and `d_{k-2}`
/// zero singular values.
pub fn verify_sigma_pattern(u: &BlockUnitary, bath: &BathSpec) -> Result<bool> {
    let k_max = bath.max_level();
    for k in 1..=bath.max_joint_sector().min(u.num_sectors() - 1) {
        let sector = u.sector(k);
        let must_vanish: &[(usize, usize)] = if k >= 2 && k <= k_max {
            &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 2)]
        } else {
            &[(0, 1), (1, 0), (1, 2), (2, 1)]
        };
        for &(i, j) in must_vanish {
            if let Some(blk) = sector.block(i, j) {
                let m = max_abs(&blk);
                if m > PATTERN_TOL {
                    return Err(Error::Structure(format!(
                        "sector {k}: block u[{i}][{j}] has max entry {m:.3e}; \
                         the point-(b) zero pattern does not hold"
                    )));
                }
            }
        }
    }
    for k in 2..=k_max {
        let sector = u.sector(k);
        let u00 = sector.block(0, 0).expect("full sector has level 0");
        let mut sv: Vec<f64> = u00.clone().svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let keep = bath.degeneracy(k) - bath.degeneracy(k - 2);
        for (s, &sigma) in sv.iter().enumerate() {
            let want = if s < keep { 1.0 } else { 0.0 };
            if (sigma - want).abs() > SIGMA_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{make_bath, Scheme};

    fn bath_k4() -> BathSpec {
        make_bath(0.5, 4, Scheme::Geometric(2.0)).unwrap()
    }

    #[test]
    fn random_unitary_is_unitary_and_deterministic() {
        let bath = bath_k4();
        let u1 = random_block_unitary(&bath, 42).unwrap();
        let u2 = random_block_unitary(&bath, 42).unwrap();
        assert!(u1.unitarity_residual() < 1e-12);
        for (s1, s2) in u1.sectors().iter().zip(u2.sectors()) {
            assert_eq!(s1.matrix, s2.matrix);
        }
        let u3 = random_block_unitary(&bath, 43).unwrap();
        assert!(u1.sector(2).matrix != u3.sector(2).matrix);
    }

    #[test]
    fn sampling_guard_triggers() {
        let bath = make_bath(0.5, 14, Scheme::Geometric(2.0)).unwrap();
        assert!(matches!(random_block_unitary(&bath, 1), Err(Error::Resource(_))));
    }

    #[test]
    fn optimal_pointb_sectors_are_unitary() {
        for k in [4usize, 6] {
            let bath = make_bath(0.5, k, Scheme::Geometric(2.0)).unwrap();
            let u = optimal_pointb_unitary(&bath).unwrap();
            assert!(u.unitarity_residual() < 1e-12);
            assert_eq!(u.num_sectors(), k + 3);
        }
    }

    #[test]
    fn optimal_pointb_passes_sigma_pattern() {
        let bath = make_bath(0.5, 6, Scheme::Geometric(2.0)).unwrap();
        let u = optimal_pointb_unitary(&bath).unwrap();
        assert!(verify_sigma_pattern(&u, &bath).unwrap());
    }

    #[test]
    fn random_completions_are_unitary_and_forced() {
        let bath = bath_k4();
        for seed in 0..10u64 {
            let u = random_pointb_completion(&bath, seed).unwrap();
            assert!(u.unitarity_residual() < 1e-12, "seed {seed}");
            assert!(verify_sigma_pattern(&u, &bath).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn identity_lacks_the_zero_pattern() {
        let bath = bath_k4();
        let id = BlockUnitary::identity(&bath);
        assert!(matches!(verify_sigma_pattern(&id, &bath), Err(Error::Structure(_))));
    }
}
