//! Dense linear-algebra kernel shared by every other module.
//!
//! Matrices are stored row-major in a flat `Vec<f64>`. [`SymMatrix`] keeps
//! both triangles so rows can be read contiguously; symmetry is enforced at
//! construction.

mod eigen;
mod kmeans;
mod project;

pub use eigen::{select_eig, sym_eig, sym_eig_full, EigenPairs, Spectrum};
pub(crate) use eigen::{partial_eig, sym_eigenvalues};
pub use kmeans::{kmeans, kmeans_detailed, KMeansResult, DEFAULT_RESTARTS};
pub use project::{project_psd, project_simplex, project_simplex_in_place};
pub(crate) use project::simplex_threshold;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Dense row-major `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        let k = k.min(self.cols);
        Matrix::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`.
    pub fn tmatmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.rows, other.rows)?;
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, b, &mut out.data[i * other.cols..(i + 1) * other.cols]);
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// Inverse of a small square matrix by Gauss-Jordan elimination with
    /// partial pivoting. Returns `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a.get(x, c).abs().total_cmp(&a.get(y, c).abs()))
                .unwrap();
            let pivot = a.get(p, c);
            if pivot.abs() <= 1e-300 || pivot.abs() <= f64::EPSILON * scale * 1e-4 {
                return None;
            }
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pinv = 1.0 / a.get(c, c);
            a.row_mut(c).iter_mut().for_each(|v| *v *= pinv);
            inv.row_mut(c).iter_mut().for_each(|v| *v *= pinv);
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.get(r, c);
                if f != 0.0 {
                    for j in 0..n {
                        let ac = a.get(c, j);
                        let ic = inv.get(c, j);
                        a.data[r * n + j] -= f * ac;
                        inv.data[r * n + j] -= f * ic;
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Dense symmetric `n x n` matrix with full (both-triangle) storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Wraps row-major data, replacing it by `(M + Mᵀ)/2`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("matrix dimension must be at least 1".into()));
        }
        check_dim(n * n, data.len())?;
        let mut m = Self { n, data };
        m.symmetrize();
        Ok(m)
    }

    /// Wraps data that the caller guarantees is exactly symmetric.
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        check_dim(m.rows(), m.cols())?;
        Self::new(m.rows(), m.as_slice().to_vec())
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Matrix with every entry equal to `v` (`v·E_n`).
    pub fn constant(n: usize, v: f64) -> Self {
        Self {
            n,
            data: vec![v; n * n],
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// `V · diag(w) · Vᵀ` for a column set `V` (n x k).
    pub fn from_outer(v: &Matrix, w: &[f64]) -> Self {
        let n = v.rows();
        let k = v.cols();
        let mut m = Self::zeros(n);
        // scaled copy of rows so the inner loop is a plain dot product
        let mut scaled = v.clone();
        for i in 0..n {
            for (c, x) in scaled.row_mut(i).iter_mut().enumerate().take(k) {
                *x *= w[c];
            }
        }
        for i in 0..n {
            let vi = scaled.row(i);
            for j in i..n {
                let s = dot(vi, v.row(j));
                m.data[i * n + j] = s;
                m.data[j * n + i] = s;
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mutable access to raw storage. Callers must keep the matrix symmetric.
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.n,
            cols: self.n,
            data: self.data.clone(),
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `⟨self, other⟩ = trace(selfᵀ other)`.
    pub fn inner(&self, other: &SymMatrix) -> Result<f64> {
        check_dim(self.n, other.n)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_dim(self.n, other.n)?;
        Ok(SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_dim(self.n, other.n)?;
        Ok(SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &SymMatrix) -> Result<Matrix> {
        self.to_matrix().matmul(&other.to_matrix())
    }

    /// Principal submatrix on `idx` (rows and columns, in order).
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        let m = idx.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in idx {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        SymMatrix { n: m, data }
    }

    /// Simultaneous row/column permutation: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permute(&self, p: &[usize]) -> SymMatrix {
        self.submatrix(p)
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }
}

/// Squared Euclidean distances between the rows of `y`.
pub fn pairwise_sq_dist(y: &Matrix) -> SymMatrix {
    let n = y.rows().max(1);
    let mut d = SymMatrix::zeros(n);
    for i in 0..y.rows() {
        let yi = y.row(i);
        for j in (i + 1)..y.rows() {
            // difference form keeps exact zeros for duplicated rows
            let v: f64 = yi.iter().zip(y.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            d.set(i, j, v);
        }
    }
    d
}

/// Dot product with four independent accumulators.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in (4 * chunks)..n {
        s += a[i] * b[i];
    }
    s
}

/// `y += a·x`.
#[inline]
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert!(SymMatrix::new(0, vec![]).is_err());
        assert!(SymMatrix::new(2, vec![1.0]).is_err());
    }

    #[test]
    fn pairwise_distances() {
        let y = Matrix::from_rows(&[[0.0], [3.0]]).unwrap();
        let d = pairwise_sq_dist(&y);
        assert_eq!(d.as_slice(), &[0.0, 9.0, 9.0, 0.0]);

        let y = Matrix::from_rows(&[[0.0, 0.0], [3.0, 4.0], [3.0, 4.0]]).unwrap();
        let d = pairwise_sq_dist(&y);
        assert_eq!(d.get(0, 1), 25.0);
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(2, 2), 0.0);
    }

    #[test]
    fn small_inverse() {
        let a = Matrix::from_rows(&[[4.0, 7.0], [2.0, 6.0]]).unwrap();
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - e).abs() < 1e-12);
            }
        }
        let singular = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn outer_product_reconstruction() {
        let v = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let m = SymMatrix::from_outer(&v, &[2.0, 3.0]);
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(2, 2), 5.0);
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(1, 2), 3.0);
    }
}
