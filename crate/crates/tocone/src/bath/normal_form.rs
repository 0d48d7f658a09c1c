//! Equivalent-unitary normal form: per-sector SVD of the main blocks turns
//! them into diagonal, nonnegative, non-increasing matrices while
//! preserving the transition matrix and never decreasing the preserved
//! coherence (von Neumann's trace inequality).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::bath::block::{empty_sector, BlockUnitary, Sector};
use crate::bath::BathSpec;
use crate::error::{Error, Result};

/// Returns `A^dag U B` where `A` and `B` are block-diagonal unitaries built
/// from the SVDs `u[j][j]^k = A M B^dag` of every main block. The result
/// has diagonal nonnegative non-increasing main blocks, the same transition
/// matrix, and coherence at least that of `U`.
pub fn svd_normal_form(u: &BlockUnitary, bath: &BathSpec) -> Result<BlockUnitary> {
    let mut sectors: Vec<Sector> = Vec::with_capacity(u.num_sectors());
    for k in 0..=bath.max_joint_sector() {
        let template = empty_sector(bath, k);
        let src = u.sector(k);
        if src.dims != template.dims {
            return Err(Error::Inconsistency(format!(
                "sector {k} has dims {:?}, bath expects {:?}",
                src.dims, template.dims
            )));
        }
        let n = template.matrix.nrows();
        let mut a = DMatrix::<C64>::zeros(n, n);
        let mut b = DMatrix::<C64>::zeros(n, n);
        for (pos, &level) in template.levels.iter().enumerate() {
            let d = template.dims[pos];
            let off = template.offsets[pos];
            let blk = src.block(level, level).expect("main block present");
            let svd = blk.svd(true, true);
            let a_jj = svd.u.expect("svd with u");
            let b_jj = svd.v_t.expect("svd with v_t").adjoint();
            a.view_mut((off, off), (d, d)).copy_from(&a_jj);
            b.view_mut((off, off), (d, d)).copy_from(&b_jj);
        }
        let mut out = template;
        out.matrix = a.adjoint() * &src.matrix * b;
        sectors.push(out);
    }
    Ok(BlockUnitary::from_sectors(sectors))
}

/// Diagnostics of how far a unitary is from normal form: worst off-diagonal
/// magnitude, worst imaginary/negative part on the diagonal, and the worst
/// violation of the non-increasing order.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalFormResidual {
    pub off_diagonal: f64,
    pub non_real: f64,
    pub ordering: f64,
}

/// Measures property (a) of the normal form on every main block.
pub fn normal_form_residual(u: &BlockUnitary, bath: &BathSpec) -> NormalFormResidual {
    let mut r = NormalFormResidual::default();
    for k in 0..=bath.max_joint_sector() {
        let sector = u.sector(k);
        for &level in &sector.levels {
            let blk = sector.block(level, level).expect("main block present");
            let d = blk.nrows();
            let mut prev = f64::INFINITY;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        r.off_diagonal = r.off_diagonal.max(blk[(i, j)].norm());
                    }
                }
                let e = blk[(i, i)];
                r.non_real = r.non_real.max(e.im.abs()).max((-e.re).max(0.0));
                r.ordering = r.ordering.max(e.re - prev);
                prev = e.re;
            }
        }
    }
    r
}
