//! Small dense matrices and Householder orthogonal completion.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
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

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
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

    /// `max |(M^T M - I)_{ij}|`
    pub fn orthogonality_residual(&self) -> T {
        let gram = self.transpose().matmul(self).expect("square product");
        let mut worst = T::zero();
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((gram[(i, j)] - target).abs());
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

/// Orthogonal matrix whose first column is `v / |v|`.
///
/// Built from a single Householder reflector. The reflector is chosen to
/// avoid cancellation and the first column is negated afterwards when
/// needed, which keeps the matrix orthogonal.
pub fn householder_completion<T: Scalar>(v: &[T]) -> Result<Matrix<T>> {
    let n = v.len();
    if n == 0 {
        return Err(Error::ZeroVector);
    }
    let len = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if !(len > T::zero()) || !len.is_finite() {
        return Err(Error::ZeroVector);
    }
    let u: Vec<T> = v.iter().map(|&x| x / len).collect();
    // H = I - 2 h h^T / (h^T h) with h = u + s e1 maps e1 to -s u.
    let s = if u[0] >= T::zero() { T::one() } else { -T::one() };
    let mut h = u.clone();
    h[0] = h[0] + s;
    let hh = h.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let two = T::of(2.0);
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = m[(i, j)] - two * h[i] * h[j] / hh;
        }
    }
    // First column is -s u; store +u instead.
    for i in 0..n {
        m[(i, 0)] = u[i];
    }
    Ok(m)
}
