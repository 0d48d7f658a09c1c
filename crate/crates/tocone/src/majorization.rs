//! Thermo-majorization: Gibbs-weighted Lorenz curves and the population
//! reachability order they induce.

use crate::error::{Error, Result};
use crate::gibbs::GibbsVector;

const SIMPLEX_TOL: f64 = 1e-9;

/// Piecewise-linear Lorenz curve of a population vector with Gibbs weights
/// on the horizontal axis, built in beta-order (descending `p_i / gamma_i`).
/// Nodes are the cumulative points `(sum gamma, sum p)` including `(0, 0)`.
#[derive(Debug, Clone)]
pub struct LorenzCurve {
    nodes: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn new(p: &[f64; 3], q: f64) -> Result<Self> {
        let gv = GibbsVector::new(q)?;
        if p.iter().any(|&x| x < -SIMPLEX_TOL) || (p.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOL
        {
            return Err(Error::Domain(format!("{p:?} is not on the probability simplex")));
        }
        let g = gv.populations();
        let mut order: Vec<usize> = (0..3).collect();
        // descending ratio; ties broken by index for determinism
        order.sort_by(|&a, &b| {
            let ra = p[a] / g[a];
            let rb = p[b] / g[b];
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        let mut nodes = vec![(0.0, 0.0)];
        let (mut cx, mut cy) = (0.0, 0.0);
        for &i in &order {
            cx += g[i];
            cy += p[i];
            nodes.push((cx, cy));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Curve height at horizontal position `x` (clamped to `[0, 1]`).
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.nodes.last().unwrap().0);
        for w in self.nodes.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x <= x1 {
                if x1 - x0 <= f64::EPSILON {
                    return y1.max(y0);
                }
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        self.nodes.last().unwrap().1
    }

    /// Minimum over both node sets of `self(x) - other(x)`. Nonnegative iff
    /// `other` majorizes `self` nowhere, i.e. `self` lies at or above.
    pub fn min_clearance_over(&self, other: &Self) -> f64 {
        let mut m = f64::INFINITY;
        for &(x, _) in self.nodes.iter().chain(other.nodes.iter()) {
            m = m.min(self.eval(x) - other.eval(x));
        }
        m
    }
}

/// Outcome of a thermo-majorization comparison, with the signed clearance
/// used to detect near-boundary cases.
#[derive(Debug, Clone, Copy)]
pub struct Reachability {
    pub reachable: bool,
    /// min over curve nodes of (input curve - output curve); negative means
    /// the output curve pokes above the input curve somewhere.
    pub clearance: f64,
}

/// True iff the beta-ordered Lorenz curve of `p_out` lies at or below that
/// of `p_in` at every node (Gibbs weights `(1, q, q^2)/Z` on the horizontal
/// axis).
pub fn thermo_majorization_reachable(q: f64, p_in: &[f64; 3], p_out: &[f64; 3]) -> Result<bool> {
    Ok(thermo_majorization_clearance(q, p_in, p_out)?.reachable)
}

/// As [`thermo_majorization_reachable`], also reporting the signed clearance.
pub fn thermo_majorization_clearance(
    q: f64,
    p_in: &[f64; 3],
    p_out: &[f64; 3],
) -> Result<Reachability> {
    let lin = LorenzCurve::new(p_in, q)?;
    let lout = LorenzCurve::new(p_out, q)?;
    let clearance = lin.min_clearance_over(&lout);
    Ok(Reachability { reachable: clearance >= -1e-12, clearance })
}
