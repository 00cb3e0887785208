//! One-sided Jacobi singular value decomposition.
//!
//! The working matrix is repeatedly swept with plane rotations that
//! orthogonalize column pairs; on convergence the column norms are the
//! singular values and the accumulated rotations give the right factor.
//! Chosen for accuracy at the matrix sizes this crate certifies (a few
//! thousand on a side at most): every rotation is orthogonal, so singular
//! values come out with near-machine relative accuracy. Every decomposition
//! is verified against the input before being returned.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Convergence threshold on the normalized off-diagonal mass: a column pair
/// `(p, q)` counts as orthogonal once `|<w_p, w_q>| <= TOL * ||w_p|| ||w_q||`.
const OFF_DIAG_TOL: f64 = 1e-12;

/// Sweep limit; one-sided Jacobi converges in well under this many sweeps
/// for any matrix the crate builds.
const MAX_SWEEPS: usize = 64;

/// Relative reconstruction residual allowed for a returned decomposition.
const RECONSTRUCT_TOL: f64 = 1e-10;

/// A verified decomposition `m = u * diag(sigma) * v^T`.
///
/// With `k = min(rows, cols)`: `u` is `rows x k`, `sigma` has length `k`
/// (descending, non-negative), `v` is `cols x k`. Columns of `u` and `v`
/// paired with a zero singular value are themselves zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// Computes the SVD of `m` and verifies the reconstruction residual
/// `||m - u diag(sigma) v^T||_F <= 1e-10 * max(1, ||m||_F)`.
pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::Numerical("svd: input has non-finite entries".into()));
    }
    let flip = m.rows() < m.cols();
    let work = if flip { m.transpose() } else { m.clone() };
    let (u, sigma, v) = jacobi_tall(&work)?;
    let out = if flip {
        Svd { u: v, sigma, v: u }
    } else {
        Svd { u, sigma, v }
    };
    verify_reconstruction(m, &out)?;
    Ok(out)
}

/// Core iteration for `rows >= cols`. Returns thin `u` (rows x cols),
/// descending `sigma` (len cols), and square `v` (cols x cols).
fn jacobi_tall(m: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let rows = m.rows();
    let cols = m.cols();

    // Column-major working copies: w holds the rotated matrix, v the
    // accumulated rotations.
    let mut w: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..rows).map(|r| m.get(r, c)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|c| {
            let mut col = vec![0.0; cols];
            col[c] = 1.0;
            col
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        // Cached squared column norms, refreshed each sweep and updated
        // incrementally after every rotation.
        let mut norms: Vec<f64> = w.iter().map(|col| dot(col, col)).collect();
        for p in 0..cols {
            for q in (p + 1)..cols {
                let a = norms[p];
                let b = norms[q];
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let c = dot(&w[p], &w[q]);
                if c.abs() <= OFF_DIAG_TOL * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (b - a) / (2.0 * c);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut w, p, q, cs, sn);
                rotate(&mut v, p, q, cs, sn);
                norms[p] = a * cs * cs - 2.0 * cs * sn * c + b * sn * sn;
                norms[q] = a * sn * sn + 2.0 * cs * sn * c + b * cs * cs;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "svd: no convergence within {MAX_SWEEPS} sweeps"
        )));
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..cols).collect();
    let sigmas: Vec<f64> = w.iter().map(|col| dot(col, col).sqrt()).collect();
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap());

    let mut u_out = DenseMatrix::zeros(rows, cols);
    let mut v_out = DenseMatrix::zeros(cols, cols);
    let mut sigma_out = Vec::with_capacity(cols);
    for (slot, &src) in order.iter().enumerate() {
        let s = sigmas[src];
        sigma_out.push(s);
        if s > 0.0 {
            for (r, &wv) in w[src].iter().enumerate() {
                u_out.set(r, slot, wv / s);
            }
        }
        for (r, &vv) in v[src].iter().enumerate() {
            v_out.set(r, slot, vv);
        }
    }
    Ok((u_out, sigma_out, v_out))
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Applies the plane rotation to columns `p` and `q` of a column-major buffer.
fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, cs: f64, sn: f64) {
    debug_assert!(p < q);
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = cs * *x - sn * *y;
        let yq = sn * *x + cs * *y;
        *x = xp;
        *y = yq;
    }
}

fn verify_reconstruction(m: &DenseMatrix, f: &Svd) -> Result<()> {
    let scale = f.sigma.first().copied().unwrap_or(0.0).max(1.0);
    for (i, s) in f.sigma.iter().enumerate() {
        if !s.is_finite() || *s < 0.0 {
            return Err(Error::Numerical(format!("svd: invalid singular value {s}")));
        }
        if i > 0 && f.sigma[i - 1] < *s - 1e-15 * scale {
            return Err(Error::Numerical("svd: singular values not sorted".into()));
        }
    }
    let mut resid_sq = 0.0;
    let k = f.sigma.len();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let mut acc = 0.0;
            for (i, s) in f.sigma.iter().enumerate().take(k) {
                acc += f.u.get(r, i) * s * f.v.get(c, i);
            }
            let d = m.get(r, c) - acc;
            resid_sq += d * d;
        }
    }
    let denom = m.frobenius_norm().max(1.0);
    if resid_sq.sqrt() > RECONSTRUCT_TOL * denom {
        return Err(Error::Numerical(format!(
            "svd: reconstruction residual {:.3e} exceeds {:.1e} (relative)",
            resid_sq.sqrt() / denom,
            RECONSTRUCT_TOL
        )));
    }
    Ok(())
}
