use alloc::vec;

use super::{Bits, Graph};
use crate::{Error, Result};

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
pub const DEFAULT_SPECTRAL_MAX_ITER: usize = 100_000;

/// Largest adjacency eigenvalue `lambda_1` with the default iteration cap.
pub fn spectral_radius(g: &Graph, tol: f64) -> Result<f64> {
    spectral_radius_with(g, tol, DEFAULT_SPECTRAL_MAX_ITER)
}

/// Largest adjacency eigenvalue by power iteration on `A + I`.
///
/// The identity shift makes every eigenvalue of a bipartite graph's `+-lambda_1`
/// pair distinct in modulus, so the iteration cannot oscillate. The start
/// vector is all-ones, which overlaps the Perron vector of every component.
/// Stops when the residual `||(A + I)x - rho x||_2` of the unit iterate
/// drops below `tol`; the Rayleigh quotient is then within `tol` of an
/// eigenvalue.
pub fn spectral_radius_with(g: &Graph, tol: f64, max_iter: usize) -> Result<f64> {
    spectral_radius_on(g, super::full_mask(g.n()), tol, max_iter)
}

/// Power iteration restricted to the subgraph induced by `mask`.
pub(crate) fn spectral_radius_on(g: &Graph, mask: u64, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("spectral tolerance must be positive"));
    }
    let n = g.n();
    let count = mask.count_ones() as usize;
    if count == 0 {
        return Ok(0.0);
    }
    let mut x = vec![0.0f64; n];
    let start = 1.0 / libm::sqrt(count as f64);
    for i in Bits(mask) {
        x[i] = start;
    }
    let mut y = vec![0.0f64; n];
    for _ in 0..max_iter {
        for i in Bits(mask) {
            let mut s = x[i];
            for j in Bits(g.rows[i] & mask) {
                s += x[j];
            }
            y[i] = s;
        }
        let mut rho = 0.0;
        let mut norm2 = 0.0;
        for i in Bits(mask) {
            rho += x[i] * y[i];
            norm2 += y[i] * y[i];
        }
        let mut resid2 = 0.0;
        for i in Bits(mask) {
            let r = y[i] - rho * x[i];
            resid2 += r * r;
        }
        if resid2 < tol * tol {
            return Ok(rho - 1.0);
        }
        let inv = 1.0 / libm::sqrt(norm2);
        for i in Bits(mask) {
            x[i] = y[i] * inv;
        }
    }
    Err(Error::SpectralNoConvergence { iterations: max_iter })
}
