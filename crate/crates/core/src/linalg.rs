//! Thin helpers over `nalgebra` dense matrices.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Matrix whose `j`-th column is `cols[j]`.
pub fn from_columns(cols: &[Vec<f64>]) -> Matrix {
    let d = cols.len();
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, d, |i, j| cols[j][i])
}

pub fn det(m: &Matrix) -> f64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    m.clone().lu().try_inverse()
}

pub fn mat_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn transpose_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    (m.transpose() * DVector::from_column_slice(v)).iter().copied().collect()
}
