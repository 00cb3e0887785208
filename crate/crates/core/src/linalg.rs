//! Dense floating-point matrices and the norm calculus built on the SVD:
//! operator norms, Schatten p-norms, and the row-space norm of a matrix
//! family. The SVD itself lives in [`crate::svd`].

use crate::error::{Error, Result};
use crate::svd::svd;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// All singular values of `m`, descending. The underlying decomposition is
/// verified against `m` (relative reconstruction residual below `1e-10`)
/// before the values are returned.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.sigma)
}

/// Largest singular value.
pub fn operator_norm(m: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Schatten p-norm `(sum_i sigma_i^p)^{1/p}` for `p >= 1`.
pub fn schatten_norm(m: &DenseMatrix, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::Domain(format!(
            "schatten_norm: p must be finite and >= 1, got {p}"
        )));
    }
    let sigma = singular_values(m)?;
    Ok(sigma.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Row-space norm of a family of square matrices:
/// `|| sum_t a_t a_t^T ||^{1/2}` in the operator norm.
///
/// All members must be square and of equal size.
pub fn row_min_norm(family: &[DenseMatrix]) -> Result<f64> {
    let first = family
        .first()
        .ok_or_else(|| Error::Input("row_min_norm: empty family".into()))?;
    if !first.is_square() {
        return Err(Error::Input("row_min_norm: matrices must be square".into()));
    }
    let d = first.rows();
    let mut gram = DenseMatrix::zeros(d, d);
    for (t, a) in family.iter().enumerate() {
        if a.rows() != d || a.cols() != d {
            return Err(Error::Input(format!(
                "row_min_norm: member {t} has size {}x{}, expected {d}x{d}",
                a.rows(),
                a.cols()
            )));
        }
        // gram += a a^T
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += a.get(r, k) * a.get(c, k);
                }
                gram.add_to(r, c, acc);
            }
        }
    }
    Ok(operator_norm(&gram)?.sqrt())
}
