//! Small dense kernels: a row-major matrix type, a cyclic Jacobi eigensolver
//! for symmetric matrices and a one-sided Jacobi SVD.
//!
//! These are written against [`num_traits::Float`] so they run on `f32` and
//! `f64` alike. They favour accuracy over speed; the SDP inner loop uses
//! nalgebra's eigensolver and only the post-hoc certificates come through
//! here.

use std::ops::{Index, IndexMut};

use num_traits::Float;
use serde::Serialize;

use crate::error::{input, Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return input(format!("matrix data has {} entries, expected {rows}x{cols}", data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return input("ragged rows");
        }
        Ok(Matrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return input(format!(
                "matmul shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self^T * self`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                if row[i] == T::zero() {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] = g.data[i * n + j] + row[i] * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return input(format!("vector of length {} for {} columns", v.len(), self.cols));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)).collect())
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows.min(self.cols) {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix<T>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Only the upper triangle is read. Converges quadratically once the
/// off-diagonal mass is small; fails with [`Error::Numerical`] after
/// `MAX_SWEEPS` sweeps.
pub fn jacobi_eigen<T: Float>(a: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    if !a.is_square() {
        return input("eigen-decomposition of a non-square matrix");
    }
    if !a.is_finite() {
        return input("non-finite matrix entries");
    }
    let n = a.nrows();
    let mut m = Matrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
    let mut v = Matrix::identity(n);
    let scale = m.frobenius();
    let tol = T::epsilon() * scale;

    let mut sweeps = 0;
    loop {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= tol || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numerical {
                what: format!("Jacobi eigensolver stalled with off-diagonal norm {:?}", off.sqrt().to_f64()),
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let two = T::one() + T::one();
                let theta = (aqq - app) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}

/// Smallest eigenvalue of a symmetric matrix via [`jacobi_eigen`].
pub fn min_eigenvalue<T: Float>(a: &Matrix<T>) -> Result<T> {
    let eig = jacobi_eigen(a)?;
    Ok(eig.values.first().copied().unwrap_or_else(T::zero))
}

/// Singular values (descending) by one-sided Jacobi orthogonalisation.
pub fn singular_values<T: Float>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_finite() {
        return input("non-finite matrix entries");
    }
    // Work on the orientation with fewer columns.
    let work = if a.ncols() > a.nrows() { a.transpose() } else { a.clone() };
    let (rows, cols) = (work.nrows(), work.ncols());
    // Column-major copy: columns are contiguous.
    let mut colv: Vec<Vec<T>> = (0..cols).map(|j| (0..rows).map(|i| work[(i, j)]).collect()).collect();
    let eps = T::epsilon();

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for k in 0..rows {
                    alpha = alpha + colv[i][k] * colv[i][k];
                    beta = beta + colv[j][k] * colv[j][k];
                    gamma = gamma + colv[i][k] * colv[j][k];
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::one() + T::one();
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let xi = colv[i][k];
                    let xj = colv[j][k];
                    colv[i][k] = c * xi - s * xj;
                    colv[j][k] = s * xi + c * xj;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(Error::Numerical { what: "one-sided Jacobi SVD did not converge".into(), iterations: sweeps });
        }
    }

    let mut sv: Vec<T> = colv.iter().map(|c| c.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv)
}

/// Matrix nuclear norm: the sum of singular values.
pub fn nuclear_norm<T: Float>(a: &Matrix<T>) -> Result<T> {
    Ok(singular_values(a)?.into_iter().fold(T::zero(), |acc, s| acc + s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalises_known_matrix() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = jacobi_eigen(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        // A v = lambda v
        for k in 0..2 {
            for i in 0..2 {
                let av: f64 = (0..2).map(|j| a[(i, j)] * eig.vectors[(j, k)]).sum();
                assert!((av - eig.values[k] * eig.vectors[(i, k)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_values_of_rank_one() {
        let a = Matrix::from_fn(3, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 1.5));
        let sv = singular_values(&a).unwrap();
        let expected = a.frobenius();
        assert!((sv[0] - expected).abs() < 1e-12 * expected);
        assert!(sv[1..].iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn nuclear_norm_f32() {
        let a: Matrix<f32> = Matrix::identity(3);
        assert!((nuclear_norm(&a).unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a: Matrix<f64> = Matrix::identity(2);
        a[(0, 1)] = f64::NAN;
        assert!(matches!(singular_values(&a), Err(Error::Input(_))));
        assert!(jacobi_eigen(&a).is_err());
    }
}
