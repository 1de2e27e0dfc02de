//! Small dense square matrices and determinants.

use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix { dim, data: vec![T::zero(); dim * dim] }
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend_from_slice(r);
        }
        SquareMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            let pv = a[piv * n + col];
            if pv == T::zero() {
                return T::zero();
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                det = -det;
            }
            det *= pv;
            for r in col + 1..n {
                let f = a[r * n + col] / pv;
                if f != T::zero() {
                    for c in col..n {
                        let v = a[col * n + c];
                        a[r * n + c] -= f * v;
                    }
                }
            }
        }
        det
    }

    /// Product of Euclidean row norms (Hadamard bound on `|det|`).
    pub fn row_norm_product(&self) -> T {
        (0..self.dim).fold(T::one(), |acc, i| {
            acc * self.row(i).iter().fold(T::zero(), |s, &v| s + v * v).sqrt()
        })
    }

    /// `det / Π‖row_i‖`, a scale-free value in `[-1, 1]`; zero for a zero row.
    pub fn normalized_det(&self) -> T {
        let mut a = self.clone();
        for i in 0..self.dim {
            let norm = a.row(i).iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            for j in 0..self.dim {
                let v = a.get(i, j) / norm;
                a.set(i, j, v);
            }
        }
        a.det()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, -0.75]]);
        assert!((m.det() + 0.75_f64).abs() < 1e-15);
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![4.0, 2.0]]);
        assert_eq!(m.det(), 0.0);
        let m = SquareMatrix::from_rows(&[vec![1e-8, 3.0], vec![2e-8, 1.0]]);
        let expect = -5e-8 / ((9.0 + 1e-16f64).sqrt() * (1.0 + 4e-16f64).sqrt());
        assert!((m.normalized_det() - expect).abs() < 1e-20);
        assert!(m.normalized_det().abs() <= 1.0);
    }
}
