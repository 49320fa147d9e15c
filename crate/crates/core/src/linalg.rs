//! Dense symmetric positive-definite kernels: Cholesky factorization, rank-one
//! updates, triangular solves and log-determinants.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// self += s * x * x^T (x must have length = rows of a square matrix).
    pub fn add_scaled_outer(&mut self, x: &[F], s: F) {
        assert_eq!(self.rows, self.cols);
        assert_eq!(x.len(), self.rows);
        for i in 0..self.rows {
            if x[i] == F::zero() {
                continue;
            }
            let si = s * x[i];
            for j in 0..self.cols {
                self[(i, j)] = self[(i, j)] + si * x[j];
            }
        }
    }

    pub fn max_abs(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    fn max_diag(&self) -> F {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self[(i, i)]).fold(F::zero(), |a, b| a.max(b))
    }

    fn symmetry_gap(&self) -> F {
        let mut g = F::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                g = g.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        g
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of an SPD matrix, L * L^T = M.
///
/// Immutable after construction; `update` returns a new factor. Solves against
/// a shared factor are read-only and safe to run concurrently.
#[derive(Clone, Debug)]
pub struct CholeskyFactor<F> {
    l: Matrix<F>,
}

/// Pivot threshold relative to the largest diagonal entry. A pivot at or below
/// it signals a singular (e.g. disconnected-graph) matrix.
const PIVOT_REL_TOL: f64 = 1e-12;

pub fn cholesky<F: Real>(m: &Matrix<F>) -> Result<CholeskyFactor<F>> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let n = m.rows();
    let scale = m.max_abs().max(F::one());
    if m.symmetry_gap() > F::real(1e-12) * scale {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    let tol = F::real(PIVOT_REL_TOL) * m.max_diag().max(F::zero());
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut s = m[(j, j)];
        for k in 0..j {
            s = s - l[(j, k)] * l[(j, k)];
        }
        if s <= tol {
            return Err(Error::NotPositiveDefinite);
        }
        let d = s.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v = v - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(CholeskyFactor { l })
}

impl<F: Real> CholeskyFactor<F> {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &Matrix<F> {
        &self.l
    }

    /// Factor of L*L^T + x*x^T, O(dim^2) sweep that preserves positivity.
    pub fn update(&self, x: &[F]) -> Result<CholeskyFactor<F>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut l = self.l.clone();
        let mut w = x.to_vec();
        let mut b = F::one();
        for j in 0..n {
            let ljj = l[(j, j)];
            let wj = w[j];
            let nljj = (ljj * ljj + wj * wj / b).sqrt();
            let gamma = ljj * ljj * b + wj * wj;
            for k in (j + 1)..n {
                w[k] = w[k] - wj * l[(k, j)] / ljj;
                l[(k, j)] = nljj * (l[(k, j)] / ljj + wj * w[k] / gamma);
            }
            l[(j, j)] = nljj;
            b = b + wj * wj / (ljj * ljj);
        }
        Ok(CholeskyFactor { l })
    }

    /// Solve L x = b by forward substitution.
    pub fn forward_solve(&self, b: &[F]) -> Result<Vec<F>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut x = vec![F::zero(); n];
        for i in 0..n {
            let mut v = b[i];
            for j in 0..i {
                v = v - self.l[(i, j)] * x[j];
            }
            x[i] = v / self.l[(i, i)];
        }
        Ok(x)
    }

    /// log det of the factored matrix: 2 * sum log L_ii.
    pub fn logdet(&self) -> F {
        let mut s = F::zero();
        for i in 0..self.dim() {
            s = s + self.l[(i, i)].ln();
        }
        s + s
    }

    /// L * L^T, for tests and diagnostics.
    pub fn reconstruct(&self) -> Matrix<F> {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = F::zero();
                for k in 0..=i.min(j) {
                    s = s + self.l[(i, k)] * self.l[(j, k)];
                }
                m[(i, j)] = s;
            }
        }
        m
    }
}

/// Determinant of a general square matrix via LU with partial pivoting.
/// Returns 0 for singular input. Used by the brute-force oracles only.
pub fn determinant<F: Real>(m: &Matrix<F>) -> F {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut det = F::one();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[(r, col)].abs() > a[(piv, col)].abs() {
                piv = r;
            }
        }
        if a[(piv, col)] == F::zero() {
            return F::zero();
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            det = -det;
        }
        det = det * a[(col, col)];
        for r in (col + 1)..n {
            let f = a[(r, col)] / a[(col, col)];
            for j in col..n {
                a[(r, j)] = a[(r, j)] - f * a[(col, j)];
            }
        }
    }
    det
}
