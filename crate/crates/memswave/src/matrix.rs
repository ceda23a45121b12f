//! Minimal dense row-major matrix, generic over the scalar kind.
//!
//! nalgebra carries the float linear algebra (LU, SVD); this type exists so
//! the Jacobian assembly can be written once and also run entrywise in
//! interval arithmetic, where products accumulate with outward rounding and
//! no blocking tricks.

use crate::scalar::Scalar;
use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
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
    pub fn at(&self, r: usize, c: usize) -> T {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: T) {
        let i = r * self.cols + c;
        self.data[i] = self.data[i] + v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Entrywise absolute-value enclosure.
    pub fn abs(&self) -> Self {
        self.map(|v| v.abs_bound())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = T::zero();
            for (a, b) in row.iter().zip(v.iter()) {
                acc = acc + *a * *b;
            }
            out[r] = acc;
        }
        out
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * out.cols;
                for (j, &b) in orow.iter().enumerate() {
                    out.data[base + j] = out.data[base + j] + a * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(other.data.iter()).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }
}

impl Mat<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.data.iter().copied())
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.set(r, c, m[(r, c)]);
            }
        }
        out
    }

    /// Exact interval lift (float entries are degenerate intervals).
    pub fn to_intervals(&self) -> Mat<crate::interval::Interval> {
        self.map(crate::interval::Interval::point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_roundtrip() {
        let mut a = Mat::<f64>::zeros(2, 3);
        a.set(0, 0, 1.0);
        a.set(0, 2, 2.0);
        a.set(1, 1, -3.0);
        let v = vec![1.0, 2.0, 3.0];
        assert_eq!(a.mul_vec(&v), vec![7.0, -6.0]);

        let i3 = Mat::<f64>::identity(3);
        assert_eq!(a.mul_mat(&i3), a);
    }
}
